#ifndef IMIMIC_WINDOW_HPP
#define IMIMIC_WINDOW_HPP

#include <deque>
#include <memory>

#include "imimic/blur.hpp"
#include "imimic/image.hpp"

namespace imimic {

// Sliding window over the input video: the current frame plus up to N
// predecessors. Each frame is pre-blurred exactly once on entry; the
// difference layers only ever touch the cached blurred planes.
class FrameWindow {
public:
    FrameWindow(int n, BlurParams blur);

    // Frames must arrive with consecutive indices and a fixed shape.
    void push(Frame frame);

    int n() const { return n_; }
    bool full() const { return int(entries_.size()) == n_ + 1; }
    size_t frames_held() const { return entries_.size(); }

    // p = 0 is the current frame, p = 1..N its predecessors.
    const Frame& frame(int p) const { return entries_[size_t(p)].frame; }
    const Plane& blurred(int p) const { return entries_[size_t(p)].blurred; }

private:
    struct Entry {
        Frame frame;
        Plane blurred;
    };

    int n_;
    GaussianBlur blur_;
    std::deque<Entry> entries_;  // front is newest
};

}  // namespace imimic

#endif
