#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mdseval/data_model.hpp"

namespace mdseval::recall {

enum class ElementKind { event, argument, causal, temporal };

std::string to_string(ElementKind k);
ElementKind kind_from_string(std::string_view s);

// The payload variant (sentence / argument / causal pair / temporal pair)
// determines the element kind.
using ElementPayload = std::variant<std::string, data::Argument,
                                    data::CausalRelation, data::TemporalRelation>;

struct KeyElement {
  ElementPayload payload;
  std::optional<std::string> rendered;

  ElementKind kind() const;

  static KeyElement event(std::string sentence);
  static KeyElement argument(data::Argument arg);
  static KeyElement causal(data::CausalRelation rel);
  static KeyElement temporal(data::TemporalRelation rel);
};

struct KeyElementSet {
  ElementKind kind;
  std::vector<KeyElement> elements;

  KeyElementSet(ElementKind k, std::vector<KeyElement> elems);
};

// Renders the element to the text handed to the discriminator: events and
// arguments pass through, relation elements go through fixed Chinese
// templates so evaluation stays deterministic.
std::string render_payload(const ElementPayload& payload);
std::string render_element(KeyElement& element);  // fills the rendered cache

struct DiscriminatorError : ToolkitError {
  using ToolkitError::ToolkitError;
};

// Binary entailment judge: 1 iff the element can be inferred from the
// summary. The wire contract is (summary, element text); element-aware
// backends may override judge_element, e.g. to honor argument corefs.
struct Discriminator {
  virtual ~Discriminator() = default;
  virtual int judge(std::string_view summary_text, std::string_view element_text) = 0;
  virtual int judge_element(std::string_view summary_text, const KeyElement& element);
  virtual std::string identity() const = 0;
};

struct ElementVerdict {
  KeyElement element;
  int verdict = 0;
};

struct RecallResult {
  ElementKind kind;
  int entailed = 0;
  int total = 0;
  double recall = 0.0;
  std::vector<ElementVerdict> per_element;
};

// Recall = (# entailed elements) / |set|. Empty sets yield nullopt; the
// metric is absent, never 0 or 1. Discriminator failures propagate with the
// offending element named.
std::optional<RecallResult> recall_for_kind(const KeyElementSet& elements,
                                            const data::GeneratedSummary& summary,
                                            Discriminator& discriminator);

// Elements of one kind drawn from the instance annotations: sub-events,
// arguments and causal pairs come from the global annotation, temporal pairs
// from the temporal set.
KeyElementSet elements_of_kind(const data::Instance& instance, ElementKind kind);

// One RecallResult per kind that has at least one annotated element.
std::map<ElementKind, RecallResult> evaluate_summary(
    const data::Instance& instance, const data::GeneratedSummary& summary,
    Discriminator& discriminator);

// Deterministic test/reference backend: entailed iff the normalized element
// text (for arguments: the surface form or any coref) is a substring of the
// normalized summary.
std::unique_ptr<Discriminator> containment_oracle();

}  // namespace mdseval::recall
