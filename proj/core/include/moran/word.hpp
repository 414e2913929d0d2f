#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace moran {

/// A finite word in the codetree: the branch choices i_1 i_2 ... i_n taken
/// from the root. Indices are 1-based; the empty word is the root.
class Word {
 public:
  using Index = std::uint32_t;

  Word() = default;
  explicit Word(std::vector<Index> indices) : indices_(std::move(indices)) {}
  Word(std::initializer_list<Index> indices) : indices_(indices) {}

  std::size_t length() const { return indices_.size(); }
  bool is_root() const { return indices_.empty(); }

  /// Branch index chosen at level k (1-based, 1 <= k <= length()).
  Index at_level(std::size_t k) const { return indices_[k - 1]; }
  Index last() const { return indices_.back(); }
  std::span<const Index> indices() const { return indices_; }

  /// The restriction i|_n.
  Word prefix(std::size_t n) const;
  /// i^-, the parent. The root has no parent.
  Word parent() const;
  /// The offspring i·index.
  Word child(Index index) const;
  /// Concatenation ij.
  Word concat(const Word& tail) const;

  void push_back(Index index) { indices_.push_back(index); }
  void pop_back() { indices_.pop_back(); }
  void set_at_level(std::size_t k, Index index) { indices_[k - 1] = index; }

  /// True when *this is a (not necessarily proper) prefix of other.
  bool is_prefix_of(const Word& other) const;

  /// Dotted text form "1.2.2"; the root renders as "-".
  std::string to_string() const;
  static Word parse(std::string_view text);

  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word& a, const Word& b) { return a.indices_ <=> b.indices_; }

 private:
  std::vector<Index> indices_;
};

/// Length of the longest common prefix i ∧ j.
std::size_t common_prefix_length(const Word& a, const Word& b);

}  // namespace moran
