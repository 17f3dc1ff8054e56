#include "imimic/prediction.hpp"

#include <algorithm>
#include <cmath>

namespace imimic {

ReliabilityResult filter_reliable(const RegionTrack& track, double change_fraction) {
    ReliabilityResult res;
    const auto& s = track.areas;
    if (s.size() < 2) return res;
    double max_s = *std::max_element(s.begin(), s.end());
    if (max_s <= 0.0) {
        res.k = int(s.size());
        return res;
    }
    double limit = change_fraction * max_s;
    double ref = s.front();

    std::vector<bool> fails(s.size(), false);
    int total = 0;
    for (size_t i = 1; i < s.size(); ++i) {
        fails[i] = std::abs(ref - s[i]) >= limit;
        total += fails[i];
    }
    int tail = 0;
    for (size_t i = s.size(); i-- > 1;) {
        if (!fails[i]) break;
        ++tail;
    }
    if (tail == int(s.size()) - 1) tail = int(s.size());  // nothing conforms
    res.k = tail;
    res.mid_window_rejections = std::max(0, total - (tail == int(s.size()) ? tail - 1 : tail));
    return res;
}

PredictionOutput predict(const PredictionState& state, const std::vector<Vec2>& V,
                         const std::vector<Vec2>& A, int k) {
    if (!state.initialized())
        throw Error(ErrorCode::NotInitialized, "no previous execution committed");
    const size_t L = state.V_prev.size();
    if (V.size() != L || A.size() + 1 != V.size())
        throw Error(ErrorCode::DimensionMismatch,
                    "velocity sets must match the committed length " + std::to_string(L));
    if (k < 0 || size_t(k) > L)
        throw Error(ErrorCode::DimensionMismatch, "k = " + std::to_string(k) +
                                                      " outside [0, " + std::to_string(L) + "]");

    // Concatenated history. The seam difference keeps A the exact first
    // difference of Vc whenever the inputs are internally consistent.
    std::vector<Vec2> Vc = state.V_prev;
    std::vector<Vec2> Ac = state.A_prev;
    size_t keep = L - size_t(k);
    if (keep > 0) {
        Ac.push_back(V.front() - state.V_prev.back());
        Vc.insert(Vc.end(), V.begin(), V.begin() + long(keep));
        Ac.insert(Ac.end(), A.begin(), A.begin() + long(keep) - 1);
    }

    const size_t target = 2 * L;
    while (Vc.size() < target) {
        Vec2 a_last = Ac.back();
        Vec2 a2 = Ac.size() >= 2 ? Ac.back() - Ac[Ac.size() - 2] : Vec2{};
        Vc.push_back(Vc.back() + a_last);
        Ac.push_back(a_last + a2);
    }

    PredictionOutput out;
    out.V.assign(Vc.end() - long(L), Vc.end());
    out.A.assign(Ac.end() - long(L) + 1, Ac.end());
    return out;
}

void commit(PredictionState& state, const std::vector<Vec2>& V, const std::vector<Vec2>& A) {
    if (V.size() < 2 || A.size() + 1 != V.size())
        throw Error(ErrorCode::DimensionMismatch,
                    "commit needs |V| >= 2 and |A| == |V| - 1");
    state.V_prev = V;
    state.A_prev = A;
}

}  // namespace imimic
