#include "mdseval/recall_metrics.hpp"

#include "mdseval/text.hpp"

namespace mdseval::recall {

std::string to_string(ElementKind k) {
  switch (k) {
    case ElementKind::event: return "event";
    case ElementKind::argument: return "argument";
    case ElementKind::causal: return "causal";
    case ElementKind::temporal: return "temporal";
  }
  return "event";
}

ElementKind kind_from_string(std::string_view s) {
  if (s == "event") return ElementKind::event;
  if (s == "argument") return ElementKind::argument;
  if (s == "causal") return ElementKind::causal;
  if (s == "temporal") return ElementKind::temporal;
  throw ToolkitError("unknown element kind: " + std::string(s));
}

ElementKind KeyElement::kind() const {
  switch (payload.index()) {
    case 0: return ElementKind::event;
    case 1: return ElementKind::argument;
    case 2: return ElementKind::causal;
    default: return ElementKind::temporal;
  }
}

KeyElement KeyElement::event(std::string sentence) {
  return KeyElement{ElementPayload(std::move(sentence)), std::nullopt};
}
KeyElement KeyElement::argument(data::Argument arg) {
  return KeyElement{ElementPayload(std::move(arg)), std::nullopt};
}
KeyElement KeyElement::causal(data::CausalRelation rel) {
  return KeyElement{ElementPayload(std::move(rel)), std::nullopt};
}
KeyElement KeyElement::temporal(data::TemporalRelation rel) {
  return KeyElement{ElementPayload(std::move(rel)), std::nullopt};
}

KeyElementSet::KeyElementSet(ElementKind k, std::vector<KeyElement> elems)
    : kind(k), elements(std::move(elems)) {
  for (const KeyElement& e : elements)
    if (e.kind() != kind)
      throw ToolkitError("element kind mismatch in KeyElementSet");
}

namespace {

// annotated sentences usually end with 。; templates supply their own joins
std::string strip_terminal(const std::string& s) {
  std::vector<uint32_t> cps = text::decode_utf8(s);
  size_t end = cps.size();
  auto droppable = [](uint32_t cp) {
    return text::is_space(cp) || cp == 0x3002 || cp == 0xFF01 || cp == 0xFF1F ||
           cp == 0xFF1B || cp == '!' || cp == '?' || cp == ';' || cp == '.';
  };
  while (end > 0 && droppable(cps[end - 1])) --end;
  return text::encode_utf8(std::vector<uint32_t>(cps.begin(), cps.begin() + end));
}

struct Renderer {
  std::string operator()(const std::string& sentence) const { return sentence; }
  std::string operator()(const data::Argument& arg) const { return arg.text; }
  std::string operator()(const data::CausalRelation& rel) const {
    if (rel.kind == data::CausalKind::cause)
      return "因为" + strip_terminal(rel.cause_sentence) + "，所以" +
             strip_terminal(rel.effect_sentence);
    return strip_terminal(rel.cause_sentence) + "，在此前提下" +
           strip_terminal(rel.effect_sentence);
  }
  std::string operator()(const data::TemporalRelation& rel) const {
    return strip_terminal(rel.earlier) + "。随后，" + strip_terminal(rel.later);
  }
};

}  // namespace

std::string render_payload(const ElementPayload& payload) {
  return std::visit(Renderer{}, payload);
}

std::string render_element(KeyElement& element) {
  if (!element.rendered) element.rendered = render_payload(element.payload);
  return *element.rendered;
}

int Discriminator::judge_element(std::string_view summary_text,
                                 const KeyElement& element) {
  return judge(summary_text, element.rendered ? *element.rendered
                                              : render_payload(element.payload));
}

std::optional<RecallResult> recall_for_kind(const KeyElementSet& elements,
                                            const data::GeneratedSummary& summary,
                                            Discriminator& discriminator) {
  if (elements.elements.empty()) return std::nullopt;
  RecallResult result;
  result.kind = elements.kind;
  result.total = static_cast<int>(elements.elements.size());
  for (const KeyElement& element : elements.elements) {
    KeyElement rendered = element;
    render_element(rendered);
    int verdict = 0;
    try {
      verdict = discriminator.judge_element(summary.text, rendered) ? 1 : 0;
    } catch (const std::exception& e) {
      throw DiscriminatorError("discriminator failed on element \"" +
                               *rendered.rendered + "\": " + e.what());
    }
    result.entailed += verdict;
    result.per_element.push_back({std::move(rendered), verdict});
  }
  result.recall = static_cast<double>(result.entailed) / result.total;
  return result;
}

KeyElementSet elements_of_kind(const data::Instance& instance, ElementKind kind) {
  std::vector<KeyElement> elements;
  switch (kind) {
    case ElementKind::event:
      if (instance.global_annotation)
        for (const std::string& s : instance.global_annotation->sub_events)
          elements.push_back(KeyElement::event(s));
      break;
    case ElementKind::argument:
      if (instance.global_annotation)
        for (const data::Argument& a : instance.global_annotation->arguments)
          elements.push_back(KeyElement::argument(a));
      break;
    case ElementKind::causal:
      if (instance.global_annotation)
        for (const data::CausalRelation& c : instance.global_annotation->causal)
          elements.push_back(KeyElement::causal(c));
      break;
    case ElementKind::temporal:
      for (const data::TemporalRelation& t : instance.temporal)
        elements.push_back(KeyElement::temporal(t));
      break;
  }
  return KeyElementSet(kind, std::move(elements));
}

std::map<ElementKind, RecallResult> evaluate_summary(
    const data::Instance& instance, const data::GeneratedSummary& summary,
    Discriminator& discriminator) {
  std::map<ElementKind, RecallResult> out;
  for (ElementKind kind : {ElementKind::event, ElementKind::argument,
                           ElementKind::causal, ElementKind::temporal}) {
    auto result =
        recall_for_kind(elements_of_kind(instance, kind), summary, discriminator);
    if (result) out.emplace(kind, std::move(*result));
  }
  return out;
}

namespace {

class ContainmentOracle : public Discriminator {
 public:
  int judge(std::string_view summary_text, std::string_view element_text) override {
    return text::contains_normalized(summary_text, element_text) ? 1 : 0;
  }

  int judge_element(std::string_view summary_text, const KeyElement& element) override {
    if (const auto* arg = std::get_if<data::Argument>(&element.payload)) {
      if (text::contains_normalized(summary_text, arg->text)) return 1;
      for (const std::string& coref : arg->corefs)
        if (text::contains_normalized(summary_text, coref)) return 1;
      return 0;
    }
    return Discriminator::judge_element(summary_text, element);
  }

  std::string identity() const override { return "containment"; }
};

}  // namespace

std::unique_ptr<Discriminator> containment_oracle() {
  return std::make_unique<ContainmentOracle>();
}

}  // namespace mdseval::recall
