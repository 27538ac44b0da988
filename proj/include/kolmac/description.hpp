#pragma once

#include <string>

#include "kolmac/rating_matrix.hpp"

namespace kolmac {

/// Serializes a user's (or item's) rating profile as `index:rating` pairs in
/// ascending index order, joined by ';' — e.g. "2:5;7:3". Distinct profiles
/// yield distinct strings; an entity with no ratings yields "".
std::string encode_entity(const RatingMatrix& m, Axis axis, std::size_t index);

}  // namespace kolmac
