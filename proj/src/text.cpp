#include "mdseval/text.hpp"

#include <algorithm>
#include <array>

namespace mdseval::text {

namespace {

bool is_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

}  // namespace

std::vector<uint32_t> decode_utf8(std::string_view s) {
  std::vector<uint32_t> out;
  out.reserve(s.size());
  size_t i = 0;
  const size_t n = s.size();
  while (i < n) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    uint32_t cp = 0xFFFD;
    size_t len = 1;
    if (c < 0x80) {
      cp = c;
    } else if ((c >> 5) == 0x6 && i + 1 < n && is_continuation(s[i + 1])) {
      cp = (static_cast<uint32_t>(c & 0x1F) << 6) |
           (static_cast<unsigned char>(s[i + 1]) & 0x3F);
      len = 2;
      if (cp < 0x80) cp = 0xFFFD;
    } else if ((c >> 4) == 0xE && i + 2 < n && is_continuation(s[i + 1]) &&
               is_continuation(s[i + 2])) {
      cp = (static_cast<uint32_t>(c & 0x0F) << 12) |
           ((static_cast<unsigned char>(s[i + 1]) & 0x3F) << 6) |
           (static_cast<unsigned char>(s[i + 2]) & 0x3F);
      len = 3;
      if (cp < 0x800 || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
    } else if ((c >> 3) == 0x1E && i + 3 < n && is_continuation(s[i + 1]) &&
               is_continuation(s[i + 2]) && is_continuation(s[i + 3])) {
      cp = (static_cast<uint32_t>(c & 0x07) << 18) |
           ((static_cast<unsigned char>(s[i + 1]) & 0x3F) << 12) |
           ((static_cast<unsigned char>(s[i + 2]) & 0x3F) << 6) |
           (static_cast<unsigned char>(s[i + 3]) & 0x3F);
      len = 4;
      if (cp < 0x10000 || cp > 0x10FFFF) cp = 0xFFFD;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string encode_utf8(uint32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
  return out;
}

std::string encode_utf8(const std::vector<uint32_t>& cps) {
  std::string out;
  out.reserve(cps.size() * 3);
  for (uint32_t cp : cps) out += encode_utf8(cp);
  return out;
}

bool is_space(uint32_t cp) {
  switch (cp) {
    case ' ':
    case '\t':
    case '\n':
    case '\r':
    case '\f':
    case '\v':
    case 0x00A0:   // no-break space
    case 0x200B:   // zero-width space
    case 0x202F:
    case 0x205F:
    case 0x3000:   // ideographic space
    case 0xFEFF:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

uint32_t fold_width(uint32_t cp) {
  if (cp >= 0xFF01 && cp <= 0xFF5E) return cp - 0xFEE0;
  switch (cp) {
    case 0x3000: return ' ';
    case 0xFF61: return 0x3002;  // 。
    case 0xFF62: return 0x300C;  // 「
    case 0xFF63: return 0x300D;  // 」
    case 0xFF64: return 0x3001;  // 、
    default: return cp;
  }
}

std::string normalize_for_match(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (uint32_t cp : decode_utf8(s)) {
    cp = fold_width(cp);
    if (is_space(cp)) continue;
    out += encode_utf8(cp);
  }
  return out;
}

namespace {

std::string collapse_impl(std::string_view s, bool fold) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  bool seen_content = false;
  for (uint32_t cp : decode_utf8(s)) {
    if (fold) cp = fold_width(cp);
    if (is_space(cp)) {
      pending_space = seen_content;
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    seen_content = true;
    out += encode_utf8(cp);
  }
  return out;
}

}  // namespace

std::string normalize_for_dedup(std::string_view s) { return collapse_impl(s, true); }

std::string collapse_whitespace(std::string_view s) { return collapse_impl(s, false); }

std::vector<std::string> char_tokens(std::string_view s) {
  std::vector<std::string> out;
  for (uint32_t cp : decode_utf8(s)) out.push_back(encode_utf8(cp));
  return out;
}

size_t length(std::string_view s) { return decode_utf8(s).size(); }

namespace {

bool is_terminal(uint32_t cp) {
  return cp == 0x3002 /*。*/ || cp == 0xFF01 /*！*/ || cp == 0xFF1F /*？*/ ||
         cp == 0xFF1B /*；*/ || cp == '!' || cp == '?' || cp == ';';
}

bool is_closer(uint32_t cp) {
  switch (cp) {
    case 0x300D:  // 」
    case 0x300F:  // 』
    case 0x201D:  // ”
    case 0x2019:  // ’
    case 0xFF09:  // ）
    case 0x3011:  // 】
    case 0x300B:  // 》
    case '"':
    case '\'':
    case ')':
    case ']':
      return true;
    default:
      return false;
  }
}

}  // namespace

std::vector<std::string> split_sentences(std::string_view s) {
  std::vector<std::string> out;
  const std::vector<uint32_t> cps = decode_utf8(s);
  std::vector<uint32_t> current;
  auto flush = [&] {
    // trim whitespace at both ends
    size_t b = 0, e = current.size();
    while (b < e && is_space(current[b])) ++b;
    while (e > b && is_space(current[e - 1])) --e;
    if (e > b)
      out.push_back(encode_utf8(std::vector<uint32_t>(current.begin() + b,
                                                      current.begin() + e)));
    current.clear();
  };
  for (size_t i = 0; i < cps.size(); ++i) {
    current.push_back(cps[i]);
    if (is_terminal(cps[i])) {
      while (i + 1 < cps.size() && is_closer(cps[i + 1])) current.push_back(cps[++i]);
      flush();
    }
  }
  flush();
  return out;
}

bool contains_normalized(std::string_view haystack, std::string_view needle) {
  const std::string h = normalize_for_match(haystack);
  const std::string n = normalize_for_match(needle);
  if (n.empty()) return false;
  return h.find(n) != std::string::npos;
}

}  // namespace mdseval::text
