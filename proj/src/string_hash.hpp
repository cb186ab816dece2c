#pragma once

#include <functional>
#include <string_view>

namespace distsem::detail {

// Transparent hashing so string-keyed maps accept string_view lookups. The
// system absl is built without std::string_view interop, so its default
// string hasher cannot be used for that.
struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
};

struct StringEq {
    using is_transparent = void;
    bool operator()(std::string_view a, std::string_view b) const noexcept { return a == b; }
};

}  // namespace distsem::detail
