#include "mdseval/remote.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace mdseval::remote {

using nlohmann::json;

HttpDiscriminator::HttpDiscriminator(const std::string& host, int port)
    : host_(host), port_(port),
      client_(std::make_unique<httplib::Client>(host, port)) {}

HttpDiscriminator::~HttpDiscriminator() = default;

int HttpDiscriminator::judge(std::string_view summary_text,
                             std::string_view element_text) {
  json req{{"summary", std::string(summary_text)},
           {"element", std::string(element_text)}};
  auto res = client_->Post("/judge", req.dump(), "application/json");
  if (!res || res->status != 200)
    throw recall::DiscriminatorError(
        "discriminator backend unreachable: " + host_ + ":" +
        std::to_string(port_));
  const json body = json::parse(res->body);
  const int verdict = body.at("entailed").get<int>();
  if (verdict != 0 && verdict != 1)
    throw recall::DiscriminatorError("discriminator returned non-binary verdict");
  return verdict;
}

std::vector<int> HttpDiscriminator::judge_batch(
    const std::vector<std::string>& summaries,
    const std::vector<std::string>& elements) {
  if (summaries.size() != elements.size())
    throw recall::DiscriminatorError("judge_batch arrays differ in length");
  json req{{"summary", summaries}, {"element", elements}};
  auto res = client_->Post("/judge_batch", req.dump(), "application/json");
  if (!res || res->status != 200)
    throw recall::DiscriminatorError(
        "discriminator backend unreachable: " + host_ + ":" +
        std::to_string(port_));
  const json body = json::parse(res->body);
  std::vector<int> verdicts = body.at("entailed").get<std::vector<int>>();
  if (verdicts.size() != summaries.size())
    throw recall::DiscriminatorError("judge_batch response length mismatch");
  for (int v : verdicts)
    if (v != 0 && v != 1)
      throw recall::DiscriminatorError("discriminator returned non-binary verdict");
  return verdicts;
}

std::string HttpDiscriminator::identity() const {
  return "http://" + host_ + ":" + std::to_string(port_);
}

void bind_discriminator(httplib::Server& server, recall::Discriminator& judge) {
  server.Post("/judge", [&judge](const httplib::Request& req,
                                 httplib::Response& res) {
    try {
      const json body = json::parse(req.body);
      const int verdict = judge.judge(body.at("summary").get<std::string>(),
                                      body.at("element").get<std::string>());
      res.set_content(json{{"entailed", verdict}}.dump(), "application/json");
    } catch (const std::exception& e) {
      res.status = 400;
      res.set_content(json{{"error", e.what()}}.dump(), "application/json");
    }
  });
  server.Post("/judge_batch", [&judge](const httplib::Request& req,
                                       httplib::Response& res) {
    try {
      const json body = json::parse(req.body);
      const auto summaries = body.at("summary").get<std::vector<std::string>>();
      const auto elements = body.at("element").get<std::vector<std::string>>();
      if (summaries.size() != elements.size()) {
        res.status = 400;
        res.set_content(json{{"error", "array length mismatch"}}.dump(),
                        "application/json");
        return;
      }
      std::vector<int> verdicts;
      verdicts.reserve(summaries.size());
      for (size_t i = 0; i < summaries.size(); ++i)
        verdicts.push_back(judge.judge(summaries[i], elements[i]));
      res.set_content(json{{"entailed", verdicts}}.dump(), "application/json");
    } catch (const std::exception& e) {
      res.status = 400;
      res.set_content(json{{"error", e.what()}}.dump(), "application/json");
    }
  });
}

}  // namespace mdseval::remote
