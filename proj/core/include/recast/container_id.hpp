#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <vector>

namespace recast {

/// Dash-separated container path such as "0-1-2". Template containers end
/// in a single lowercase letter segment ("0-a").
class ContainerId {
 public:
  ContainerId() = default;
  explicit ContainerId(std::string value) : value_(std::move(value)) {}

  static ContainerId root() { return ContainerId("0"); }

  const std::string& str() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  std::vector<std::string_view> segments() const;
  std::string_view last_segment() const;
  std::size_t depth() const;

  /// Syntax only: non-empty segments of digits or one lowercase letter,
  /// first segment "0".
  bool well_formed() const;
  bool is_root() const { return value_ == "0"; }
  bool is_template() const;

  ContainerId parent() const;
  ContainerId child(std::string_view segment) const;
  bool is_child_of(const ContainerId& parent) const;
  /// True for the id itself and every id below it.
  bool within(const ContainerId& ancestor) const;
  /// Replaces the `from` prefix with `to`; `*this` must be within `from`.
  ContainerId rebase(const ContainerId& from, const ContainerId& to) const;

  friend bool operator==(const ContainerId&, const ContainerId&) = default;
  /// Path order: segment-wise, numeric segments by value, numbers before letters.
  friend std::strong_ordering operator<=>(const ContainerId& a, const ContainerId& b);

 private:
  std::string value_;
};

}  // namespace recast
