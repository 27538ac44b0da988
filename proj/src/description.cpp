#include "kolmac/description.hpp"

namespace kolmac {

std::string encode_entity(const RatingMatrix& m, Axis axis, std::size_t index) {
    const std::vector<Entry>& profile = axis == Axis::users ? m.row(index) : m.col(index);
    std::string out;
    out.reserve(profile.size() * 8);
    for (const Entry& e : profile) {
        if (!out.empty()) out += ';';
        out += std::to_string(e.index);
        out += ':';
        out += std::to_string(e.rating);
    }
    return out;
}

}  // namespace kolmac
