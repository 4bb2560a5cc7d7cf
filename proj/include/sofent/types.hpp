#pragma once

#include <cstdint>
#include <vector>

namespace sofent {

using Vertex = std::uint32_t;
using Symbol = std::uint32_t;
// A configuration: one symbol per site, in the owning object's site order.
using Config = std::vector<Symbol>;

}  // namespace sofent
