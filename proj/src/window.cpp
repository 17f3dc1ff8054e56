#include "imimic/window.hpp"

namespace imimic {

FrameWindow::FrameWindow(int n, BlurParams blur) : n_(n), blur_(blur) {
    if (n < 3) throw Error(ErrorCode::ConfigParse, "window must cover at least 3 frames");
}

void FrameWindow::push(Frame frame) {
    if (!entries_.empty()) {
        const Frame& cur = entries_.front().frame;
        if (!frame.plane.same_shape(cur.plane))
            throw Error(ErrorCode::DimensionMismatch,
                        "frame " + std::to_string(frame.index) + " is " +
                            std::to_string(frame.width()) + "x" +
                            std::to_string(frame.height()) + ", window holds " +
                            std::to_string(cur.width()) + "x" + std::to_string(cur.height()));
        if (frame.index != cur.index + 1)
            throw Error(ErrorCode::NonConsecutiveIndex,
                        "frame " + std::to_string(frame.index) + " after " +
                            std::to_string(cur.index));
    }
    Plane blurred = blur_.apply(frame.plane);
    entries_.push_front(Entry{std::move(frame), std::move(blurred)});
    if (int(entries_.size()) > n_ + 1) entries_.pop_back();
}

}  // namespace imimic
