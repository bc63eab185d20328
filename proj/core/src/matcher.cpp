#include "placerec/matcher.hpp"

#include <algorithm>
#include <cmath>

#include "placerec/store.hpp"

namespace placerec {

void MatchConfig::validate() const {
    if (beta1 <= 0 || beta2 <= 0 || beta3 <= 0)
        throw ConfigError("matcher: beta weights must be positive");
    if (max_toggle < 0 || max_toggle > 20) throw ConfigError("matcher: max_toggle out of range");
}

namespace {

// greedy one-to-one pairing by closest distance-from-corner
template <typename T, typename DistFn>
void greedy_pairs(const std::vector<T>& a, const std::vector<T>& b, DistFn dist,
                  std::vector<std::pair<int, int>>& pairs, std::vector<int>& a_free,
                  std::vector<int>& b_free) {
    struct Cand {
        double d;
        int i, j;
    };
    std::vector<Cand> cands;
    for (int i = 0; i < int(a.size()); ++i)
        for (int j = 0; j < int(b.size()); ++j) cands.push_back({dist(a[i], b[j]), i, j});
    std::stable_sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
        if (x.d != y.d) return x.d < y.d;
        if (x.i != y.i) return x.i < y.i;
        return x.j < y.j;
    });
    std::vector<bool> ua(a.size(), false), ub(b.size(), false);
    pairs.clear();
    for (const auto& c : cands) {
        if (ua[c.i] || ub[c.j]) continue;
        ua[c.i] = ub[c.j] = true;
        pairs.push_back({c.i, c.j});
    }
    a_free.clear();
    b_free.clear();
    for (int i = 0; i < int(a.size()); ++i)
        if (!ua[i]) a_free.push_back(i);
    for (int j = 0; j < int(b.size()); ++j)
        if (!ub[j]) b_free.push_back(j);
}

double aperture_term(const std::vector<Aperture>& q, const std::vector<Aperture>& m,
                     const MatchConfig& cfg) {
    std::vector<std::pair<int, int>> pairs;
    std::vector<int> qf, mf;
    greedy_pairs(q, m,
                 [](const Aperture& a, const Aperture& b) {
                     return std::abs(a.distance - b.distance);
                 },
                 pairs, qf, mf);
    double s = 0.0;
    for (const auto& [i, j] : pairs) {
        s += cfg.beta3 * std::abs(double(q[i].type - m[j].type));
        s += cfg.beta2 * (std::abs(q[i].distance - m[j].distance) +
                          std::abs(q[i].length - m[j].length));
    }
    for (int i : qf) s += cfg.beta3 + cfg.beta2 * (q[i].distance + q[i].length);
    for (int j : mf) s += cfg.beta3 + cfg.beta2 * (m[j].distance + m[j].length);
    return s;
}

double stair_term(const std::vector<StairTuple>& q, const std::vector<StairTuple>& m,
                  const MatchConfig& cfg) {
    std::vector<std::pair<int, int>> pairs;
    std::vector<int> qf, mf;
    greedy_pairs(q, m,
                 [](const StairTuple& a, const StairTuple& b) {
                     return std::abs(a.distance - b.distance);
                 },
                 pairs, qf, mf);
    double s = 0.0;
    for (const auto& [i, j] : pairs) {
        s += cfg.beta2 * (std::abs(q[i].width - m[j].width) + std::abs(q[i].length - m[j].length) +
                          std::abs(q[i].distance - m[j].distance));
        s += cfg.beta3 * std::abs(double(q[i].type - m[j].type));
    }
    for (int i : qf) s += cfg.beta3 + cfg.beta2 * (q[i].width + q[i].length + q[i].distance);
    for (int j : mf) s += cfg.beta3 + cfg.beta2 * (m[j].width + m[j].length + m[j].distance);
    return s;
}

double corner_term(const CornerEntry& q, const CornerEntry& m, const MatchConfig& cfg) {
    return cfg.beta1 * std::abs(q.angle - m.angle) + cfg.beta2 * std::abs(q.length - m.length);
}

std::vector<Aperture> drop_closed(const std::vector<Aperture>& aps, const uint8_t* closed) {
    std::vector<Aperture> out;
    for (size_t i = 0; i < aps.size(); ++i)
        if (!closed[i]) out.push_back(aps[i]);
    return out;
}

size_t total_apertures(const SceneDescriptor& d) {
    size_t n = 0;
    for (const auto& e : d.entries) n += e.apertures.size();
    return n;
}

}  // namespace

double sim(const SceneDescriptor& query, const SceneDescriptor& model_aligned,
           const MatchConfig& cfg) {
    cfg.validate();
    if (model_aligned.entries.size() < query.entries.size())
        throw ConfigError("sim: model has fewer corners than the query");
    double s = 0.0;
    for (size_t k = 0; k < query.entries.size(); ++k) {
        const auto& q = query.entries[k];
        const auto& m = model_aligned.entries[k];
        s += corner_term(q, m, cfg);
        s += aperture_term(q.apertures, m.apertures, cfg);
        s += stair_term(q.stairs, m.stairs, cfg);
    }
    return s;
}

namespace {

// best aperture-state score for one fixed (direction, offset) view
double best_state_score(const SceneDescriptor& query, const SceneDescriptor& view,
                        const MatchConfig& cfg, std::vector<uint8_t>* closed_out) {
    const size_t nq = query.entries.size();
    const size_t total = total_apertures(view);

    if (total <= size_t(cfg.max_toggle)) {
        // exhaustive enumeration over all open/close assignments
        double best = std::numeric_limits<double>::infinity();
        uint32_t best_mask = 0;
        for (uint32_t mask = 0; mask < (1u << total); ++mask) {
            double s = 0.0;
            size_t bit = 0;
            for (size_t k = 0; k < view.entries.size(); ++k) {
                const auto& m = view.entries[k];
                std::vector<uint8_t> closed(m.apertures.size(), 0);
                for (size_t i = 0; i < m.apertures.size(); ++i, ++bit)
                    closed[i] = (mask >> bit) & 1;
                if (k >= nq) continue;  // beyond the query window: no contribution
                const auto& q = query.entries[k];
                s += corner_term(q, m, cfg);
                s += aperture_term(q.apertures,
                                   drop_closed(m.apertures, closed.data()), cfg);
                s += stair_term(q.stairs, m.stairs, cfg);
                if (s >= best) {
                    // keep scanning bits for correct bit accounting, value can only grow
                }
            }
            if (s < best) {
                best = s;
                best_mask = mask;
            }
        }
        if (closed_out) {
            closed_out->assign(total, 0);
            for (size_t b = 0; b < total; ++b) (*closed_out)[b] = (best_mask >> b) & 1;
        }
        return best;
    }

    // per-wall independent minimization; Sim decomposes per wall, so this is
    // exact and handles any aperture count
    double s = 0.0;
    std::vector<uint8_t> closed_all;
    for (size_t k = 0; k < view.entries.size(); ++k) {
        const auto& m = view.entries[k];
        std::vector<uint8_t> closed(m.apertures.size(), 0);
        if (k < nq) {
            const auto& q = query.entries[k];
            s += corner_term(q, m, cfg);
            s += stair_term(q.stairs, m.stairs, cfg);
            const size_t na = m.apertures.size();
            double best_ap = std::numeric_limits<double>::infinity();
            uint32_t best_mask = 0;
            if (na <= size_t(cfg.max_toggle)) {
                for (uint32_t mask = 0; mask < (1u << na); ++mask) {
                    std::vector<uint8_t> cl(na, 0);
                    for (size_t i = 0; i < na; ++i) cl[i] = (mask >> i) & 1;
                    const double t = aperture_term(q.apertures, drop_closed(m.apertures, cl.data()),
                                                   cfg);
                    if (t < best_ap) {
                        best_ap = t;
                        best_mask = mask;
                    }
                }
            } else {
                // degenerate wall with very many openings; compare as-is
                best_ap = aperture_term(q.apertures, m.apertures, cfg);
            }
            s += best_ap;
            for (size_t i = 0; i < na; ++i) closed[i] = (best_mask >> i) & 1;
        }
        closed_all.insert(closed_all.end(), closed.begin(), closed.end());
    }
    if (closed_out) *closed_out = std::move(closed_all);
    return s;
}

}  // namespace

std::optional<std::pair<double, Alignment>> best_alignment(const SceneDescriptor& query,
                                                           const SceneDescriptor& model,
                                                           const MatchConfig& cfg) {
    cfg.validate();
    if (model.entries.size() < query.entries.size()) return std::nullopt;
    if (model.entries.empty()) {
        if (!query.entries.empty()) return std::nullopt;
        return std::make_pair(0.0, Alignment{});
    }

    double best = std::numeric_limits<double>::infinity();
    Alignment best_al;
    for (const Direction dir : {Direction::Clockwise, Direction::Anticlockwise}) {
        const SceneDescriptor base = (dir == Direction::Clockwise) ? model : reversed(model);
        for (size_t off = 0; off < base.entries.size(); ++off) {
            const SceneDescriptor view = rotated(base, off);
            std::vector<uint8_t> closed;
            const double s = best_state_score(query, view, cfg, &closed);
            if (s < best) {
                best = s;
                best_al = {off, dir, std::move(closed)};
            }
        }
    }
    return std::make_pair(best, best_al);
}

std::optional<MatchResult> recognize(const SceneDescriptor& query, const DescriptorDB& db,
                                     const MatchConfig& cfg, std::string* diagnostic) {
    if (db.entries.empty()) {
        if (diagnostic) *diagnostic = "descriptor database is empty";
        return std::nullopt;
    }
    std::optional<MatchResult> best;
    size_t eligible = 0;
    for (size_t i = 0; i < db.entries.size(); ++i) {
        const auto r = best_alignment(query, db.entries[i].descriptor, cfg);
        if (!r) continue;  // smaller than the query: skipped, not an error
        ++eligible;
        if (!best || r->first < best->score) {
            best = MatchResult{db.entries[i].descriptor.label, r->first, r->second, i};
        }
    }
    if (!best) {
        if (diagnostic) *diagnostic = "no db entry has enough corners for this query";
        return std::nullopt;
    }
    if (best->score > cfg.accept_threshold) {
        if (diagnostic)
            *diagnostic = "best score " + std::to_string(best->score) + " above accept threshold";
        return std::nullopt;
    }
    (void)eligible;
    return best;
}

std::vector<MatchResult> rank_all(const SceneDescriptor& query, const DescriptorDB& db,
                                  const MatchConfig& cfg) {
    std::vector<MatchResult> out;
    for (size_t i = 0; i < db.entries.size(); ++i) {
        const auto r = best_alignment(query, db.entries[i].descriptor, cfg);
        if (!r) continue;
        out.push_back({db.entries[i].descriptor.label, r->first, r->second, i});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const MatchResult& a, const MatchResult& b) { return a.score < b.score; });
    return out;
}

}  // namespace placerec
