#include "newsframe/frames.hpp"

#include "newsframe/errors.hpp"

namespace newsframe {

Frame frame_from_id(int id) {
    if (id < 1 || id > kNumFrames) {
        throw DataError("frame id " + std::to_string(id) + " outside 1.." +
                        std::to_string(kNumFrames));
    }
    return kFrames[static_cast<std::size_t>(id - 1)];
}

std::optional<Frame> frame_from_name(std::string_view name) {
    for (const auto& f : kFrames) {
        if (f.name == name) return f;
    }
    return std::nullopt;
}

}  // namespace newsframe
