#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mdseval/recall_metrics.hpp"

namespace httplib {
class Client;
class Server;
}  // namespace httplib

namespace mdseval::remote {

// Client for the discriminator wire protocol:
//   POST /judge        {"summary": s, "element": e}     -> {"entailed": 0|1}
//   POST /judge_batch  {"summary": [..], "element": [..]} -> {"entailed": [..]}
// Batched arrays must have equal length.
class HttpDiscriminator : public recall::Discriminator {
 public:
  HttpDiscriminator(const std::string& host, int port);
  ~HttpDiscriminator() override;

  int judge(std::string_view summary_text, std::string_view element_text) override;
  std::vector<int> judge_batch(const std::vector<std::string>& summaries,
                               const std::vector<std::string>& elements);
  std::string identity() const override;

 private:
  std::string host_;
  int port_;
  std::unique_ptr<httplib::Client> client_;
};

// Mounts a discriminator on an httplib server under the protocol above.
// Lets any in-process discriminator (e.g. the containment oracle) back a
// remote evaluation run.
void bind_discriminator(httplib::Server& server, recall::Discriminator& judge);

}  // namespace mdseval::remote
