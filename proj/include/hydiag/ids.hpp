#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace hydiag {

// Dense index with a tag so class, action and observable ids do not mix.
template <typename Tag>
class Id {
 public:
  constexpr Id() = default;
  constexpr explicit Id(std::size_t v) : value_(static_cast<std::uint32_t>(v)) {}

  constexpr std::size_t index() const noexcept { return value_; }

  friend constexpr auto operator<=>(Id, Id) = default;

 private:
  std::uint32_t value_ = 0;
};

using ClassId = Id<struct ClassTag>;
using ActionId = Id<struct ActionTag>;
using ObservableId = Id<struct ObservableTag>;
using StateId = Id<struct StateTag>;

// Sorted, duplicate-free set of classes. The sorted form is canonical.
using ClassSet = std::vector<ClassId>;

inline void normalize(ClassSet& s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
}

inline bool contains(const ClassSet& s, ClassId c) {
  return std::binary_search(s.begin(), s.end(), c);
}

inline bool is_subset(const ClassSet& a, const ClassSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace hydiag

template <typename Tag>
struct std::hash<hydiag::Id<Tag>> {
  std::size_t operator()(hydiag::Id<Tag> id) const noexcept {
    return std::hash<std::size_t>{}(id.index());
  }
};
