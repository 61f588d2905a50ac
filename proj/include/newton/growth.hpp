#pragma once

#include <map>
#include <set>
#include <tuple>
#include <vector>

#include "newton/zero_order.hpp"

namespace newton {

/// Predicted small-parameter behavior of the sublevel volume (or of the
/// count/sum analogues over Q_p). Cases a and b give matching bounds with the
/// exponent bK/d; case b widens the log power to a bracket; case c keeps the
/// bK/d lower bound but only an upper bound with exponent bK/s.
struct GrowthPrediction {
    FieldSpec K;
    Rat d;
    int k = 0;
    char case_tag = 'a';
    Rat s;              // sup of face orders, case c only
    Rat exponent;       // bK/d (a, b) or bK/s upper side (c)
    Rat lower_exponent; // case c: the bK/d lower-bound pairing
    int log_lo = 0;     // case a: both ends n-k-1; case b: [n-k-1, n-k]
    int log_hi = 0;
    bool upper_only = false;
    bool exact = true;

    bool operator==(const GrowthPrediction&) const = default;
};

/// Per-face order report attached to the prediction.
struct FaceOrder {
    int face_id = 0;
    ZeroOrder order;
    bool in_central = false;
};

namespace detail {

struct CaseOutcome {
    char tag;
    int s;
    bool operator==(const CaseOutcome&) const = default;
    bool operator<(const CaseOutcome& o) const { return std::tie(tag, s) < std::tie(o.tag, o.s); }
};

inline CaseOutcome classify(const std::vector<int>& orders,
                            const std::vector<bool>& central, const Rat& d) {
    int smax = 0;
    bool over = false, central_eq = false;
    for (size_t i = 0; i < orders.size(); ++i) {
        smax = std::max(smax, orders[i]);
        if (Rat(orders[i]) > d) over = true;
        if (central[i] && Rat(orders[i]) == d) central_eq = true;
    }
    if (over) return {'c', smax};
    if (central_eq) return {'b', 0};
    return {'a', 0};
}

}  // namespace detail

/// Classifies f over the field and fills the predicted exponent and log
/// power. Face orders of dimension two and up come from the gradient bound
/// unless pinned through overrides (keyed by face id); when the certified
/// ranges leave more than one outcome reachable the prediction is flagged
/// inexact and reports the widest-order outcome.
inline GrowthPrediction predict_growth(const NewtonPolyhedron& P, FieldSpec K,
                                       const std::map<int, int>& overrides = {}) {
    GrowthPrediction g;
    g.K = K;
    g.d = P.distance();
    g.k = P.central_dim();
    int n = P.nvars();
    int central = P.central_face_id();

    auto ids = P.compact_face_ids();
    std::vector<ZeroOrder> ranges;
    std::vector<bool> in_central;
    for (int id : ids) {
        auto it = overrides.find(id);
        if (it != overrides.end())
            ranges.push_back(ZeroOrder{it->second, it->second, true});
        else
            ranges.push_back(face_zero_order_auto(P, id, K));
        in_central.push_back(P.face_subset(id, central));
    }

    // Enumerate the reachable outcomes across the certified ranges.
    long combos = 1;
    for (const auto& r : ranges) {
        combos *= r.hi - r.lo + 1;
        if (combos > 1024) break;
    }
    std::set<detail::CaseOutcome> outcomes;
    std::vector<int> pick(ranges.size());
    if (combos <= 1024) {
        for (size_t i = 0; i < ranges.size(); ++i) pick[i] = ranges[i].lo;
        for (;;) {
            outcomes.insert(detail::classify(pick, in_central, g.d));
            size_t pos = 0;
            while (pos < ranges.size() && pick[pos] == ranges[pos].hi) {
                pick[pos] = ranges[pos].lo;
                ++pos;
            }
            if (pos == ranges.size()) break;
            ++pick[pos];
        }
    }
    for (size_t i = 0; i < ranges.size(); ++i) pick[i] = ranges[i].hi;
    detail::CaseOutcome chosen = detail::classify(pick, in_central, g.d);
    bool ranges_decide = combos <= 1024 && outcomes.size() == 1;

    g.case_tag = chosen.tag;
    g.exact = ranges_decide;
    int bK = K.bK();
    if (chosen.tag == 'c') {
        g.s = chosen.s;
        g.exponent = Rat(bK) / g.s;
        g.lower_exponent = Rat(bK) / g.d;
        g.log_lo = g.log_hi = 0;
        g.upper_only = true;
    } else {
        g.exponent = Rat(bK) / g.d;
        g.log_lo = n - g.k - 1;
        g.log_hi = chosen.tag == 'b' ? n - g.k : n - g.k - 1;
        g.upper_only = false;
    }
    return g;
}

inline GrowthPrediction predict_growth(const Polynomial& f, FieldSpec K,
                                       const std::map<int, int>& overrides = {}) {
    return predict_growth(NewtonPolyhedron(f), K, overrides);
}

/// Face-by-face order table for reports.
inline std::vector<FaceOrder> face_order_table(const NewtonPolyhedron& P, FieldSpec K) {
    std::vector<FaceOrder> out;
    int central = P.central_face_id();
    for (int id : P.compact_face_ids()) {
        FaceOrder fo;
        fo.face_id = id;
        fo.order = face_zero_order_auto(P, id, K);
        fo.in_central = P.face_subset(id, central);
        out.push_back(fo);
    }
    return out;
}

}  // namespace newton
