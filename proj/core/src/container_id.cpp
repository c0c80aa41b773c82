#include "recast/container_id.hpp"

#include <algorithm>
#include <cctype>

namespace recast {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

bool is_letter_segment(std::string_view s) {
  return s.size() == 1 && s[0] >= 'a' && s[0] <= 'z';
}

std::strong_ordering compare_segment(std::string_view a, std::string_view b) {
  const bool da = all_digits(a);
  const bool db = all_digits(b);
  if (da != db) return da ? std::strong_ordering::less : std::strong_ordering::greater;
  if (da) {
    // Compare numerically without overflow: strip leading zeros, then length, then text.
    auto strip = [](std::string_view s) {
      while (s.size() > 1 && s.front() == '0') s.remove_prefix(1);
      return s;
    };
    a = strip(a);
    b = strip(b);
    if (a.size() != b.size()) return a.size() <=> b.size();
  }
  const int c = a.compare(b);
  return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
}

}  // namespace

std::vector<std::string_view> ContainerId::segments() const {
  std::vector<std::string_view> out;
  std::string_view rest = value_;
  while (true) {
    const auto pos = rest.find('-');
    out.push_back(rest.substr(0, pos));
    if (pos == std::string_view::npos) break;
    rest.remove_prefix(pos + 1);
  }
  return out;
}

std::string_view ContainerId::last_segment() const {
  const auto pos = value_.rfind('-');
  return pos == std::string::npos ? std::string_view(value_) : std::string_view(value_).substr(pos + 1);
}

std::size_t ContainerId::depth() const {
  return static_cast<std::size_t>(std::count(value_.begin(), value_.end(), '-'));
}

bool ContainerId::well_formed() const {
  if (value_.empty()) return false;
  const auto segs = segments();
  if (segs.front() != "0") return false;
  return std::all_of(segs.begin() + 1, segs.end(),
                     [](std::string_view s) { return all_digits(s) || is_letter_segment(s); });
}

bool ContainerId::is_template() const {
  return !is_root() && is_letter_segment(last_segment());
}

ContainerId ContainerId::parent() const {
  const auto pos = value_.rfind('-');
  if (pos == std::string::npos) return ContainerId();
  return ContainerId(value_.substr(0, pos));
}

ContainerId ContainerId::child(std::string_view segment) const {
  std::string v = value_;
  v += '-';
  v += segment;
  return ContainerId(std::move(v));
}

bool ContainerId::is_child_of(const ContainerId& p) const {
  return value_.size() > p.value_.size() + 1 && value_.compare(0, p.value_.size(), p.value_) == 0 &&
         value_[p.value_.size()] == '-' && value_.find('-', p.value_.size() + 1) == std::string::npos;
}

bool ContainerId::within(const ContainerId& a) const {
  if (value_ == a.value_) return true;
  return value_.size() > a.value_.size() && value_.compare(0, a.value_.size(), a.value_) == 0 &&
         value_[a.value_.size()] == '-';
}

ContainerId ContainerId::rebase(const ContainerId& from, const ContainerId& to) const {
  return ContainerId(to.value_ + value_.substr(from.value_.size()));
}

std::strong_ordering operator<=>(const ContainerId& a, const ContainerId& b) {
  const auto sa = a.segments();
  const auto sb = b.segments();
  const std::size_t n = std::min(sa.size(), sb.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (auto c = compare_segment(sa[i], sb[i]); c != 0) return c;
  }
  return sa.size() <=> sb.size();
}

}  // namespace recast
