#include "moran/word.hpp"

#include <algorithm>
#include <charconv>

#include "moran/error.hpp"

namespace moran {

Word Word::prefix(std::size_t n) const {
  if (n > indices_.size()) throw InvalidArgument("prefix length exceeds word length");
  return Word(std::vector<Index>(indices_.begin(), indices_.begin() + static_cast<std::ptrdiff_t>(n)));
}

Word Word::parent() const {
  if (indices_.empty()) throw InvalidArgument("the root word has no parent");
  return prefix(indices_.size() - 1);
}

Word Word::child(Index index) const {
  Word out = *this;
  out.indices_.push_back(index);
  return out;
}

Word Word::concat(const Word& tail) const {
  Word out = *this;
  out.indices_.insert(out.indices_.end(), tail.indices_.begin(), tail.indices_.end());
  return out;
}

bool Word::is_prefix_of(const Word& other) const {
  return indices_.size() <= other.indices_.size() &&
         std::equal(indices_.begin(), indices_.end(), other.indices_.begin());
}

std::string Word::to_string() const {
  if (indices_.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (i) out.push_back('.');
    out += std::to_string(indices_[i]);
  }
  return out;
}

Word Word::parse(std::string_view text) {
  if (text == "-" || text.empty()) return {};
  std::vector<Index> indices;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t dot = std::min(text.find('.', pos), text.size());
    const auto token = text.substr(pos, dot - pos);
    Index value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size() || value == 0) {
      throw InvalidArgument("malformed word '" + std::string(text) + "'");
    }
    indices.push_back(value);
    pos = dot + 1;
  }
  return Word(std::move(indices));
}

std::size_t common_prefix_length(const Word& a, const Word& b) {
  const auto ai = a.indices();
  const auto bi = b.indices();
  const auto [ia, ib] = std::mismatch(ai.begin(), ai.end(), bi.begin(), bi.end());
  return static_cast<std::size_t>(ia - ai.begin());
}

}  // namespace moran
