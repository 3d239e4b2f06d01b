#include "rtm/lightcone.hpp"

#include <algorithm>
#include <set>

namespace rtm {

int mod2(int x) { return ((x % 2) + 2) % 2; }

bool gate_in_cone(int t, int row, int bond) {
    if (row < 1 || row > t) return false;
    if (mod2(bond) != mod2(row - 1)) return false;
    return bond - (t - row) <= 0 && 0 <= bond + 1 + (t - row);
}

std::vector<Leg> ConeObject::legs() const {
    if (is_gate()) return {{bond, row}, {bond + 1, row}, {bond, row - 1}, {bond + 1, row - 1}};
    return {{bond, 0}, {bond + 1, 0}};
}

LightCone::LightCone(int t_) : t(t_) {
    std::set<std::pair<int, int>> gates;
    for (int r = 1; r <= t; ++r)
        for (int b = -t - 2; b <= t + 2; ++b)
            if (gate_in_cone(t, r, b)) {
                objects.push_back({r, b});
                gates.insert({r, b});
            }
    for (int b = -t - 3; b <= t + 3; ++b) {
        if (mod2(b) != 1) continue;
        const bool used = gates.count({1, b - 1}) || gates.count({1, b + 1}) || b == -1;
        if (used) objects.push_back({0, b});
    }
    for (const auto& o : objects)
        for (const auto& l : o.legs()) ++occurrences[l];
}

Peeled peel(int t, int t0) {
    if (t < 0 || t0 < 0 || t0 > t + 1) throw DomainError("peel: need 0 <= t0 <= t+1");
    LightCone cone(t);
    Peeled out;
    out.t = t;
    out.t0 = t0;
    const Leg top{0, t};
    for (Side side : {Side::left, Side::right}) {
        std::vector<ConeObject> sel;
        for (const auto& o : cone.objects)
            if (o.side() == side) sel.push_back(o);
        std::vector<Leg> open;
        for (int j = t0; j <= t; ++j) open.push_back({0, j});
        bool owned = false;
        for (const auto& o : sel)
            for (const auto& l : o.legs())
                if (l == top) owned = true;
        auto is_open = [&](const Leg& l) { return std::find(open.begin(), open.end(), l) != open.end(); };
        if (!owned && is_open(top)) {
            open.erase(std::find(open.begin(), open.end(), top));
            ++out.ncaps;
        }
        bool removed = true;
        while (removed) {
            removed = false;
            for (auto it = sel.begin(); it != sel.end(); ++it) {
                if (!it->is_gate()) continue;
                const int r = it->row, b = it->bond;
                const int nx = side == Side::right ? b : b + 1;
                const int fx = side == Side::right ? b + 1 : b;
                const Leg near[2] = {{nx, r - 1}, {nx, r}};
                const Leg far[2] = {{fx, r - 1}, {fx, r}};
                if (!is_open(near[0]) || !is_open(near[1])) continue;
                sel.erase(it);
                for (const auto& l : near) open.erase(std::find(open.begin(), open.end(), l));
                for (const auto& l : far) {
                    if (cone.occurrences.at(l) == 1)
                        ++out.ncaps;
                    else
                        open.push_back(l);
                }
                removed = true;
                break;
            }
        }
        // contraction order: sweep in from the far edge, bottom to top
        std::sort(sel.begin(), sel.end(), [side](const ConeObject& a, const ConeObject& b) {
            const int ka = side == Side::left ? a.bond : -a.bond;
            const int kb = side == Side::left ? b.bond : -b.bond;
            return ka != kb ? ka < kb : a.row < b.row;
        });
        PeeledSide ps;
        for (const auto& o : sel)
            for (const auto& l : o.legs())
                if (cone.occurrences.at(l) == 1 && !is_open(l) && l.x != 0) ps.caps.push_back(l);
        if (!owned && t0 == t + 1) ps.caps.push_back(top);
        std::stable_sort(open.begin(), open.end(), [](const Leg& a, const Leg& b) {
            return a.j - std::abs(a.x) < b.j - std::abs(b.x);
        });
        ps.objects = std::move(sel);
        ps.free_legs = std::move(open);
        ps.owns_top = owned;
        out.sides[int(side)] = std::move(ps);
    }
    return out;
}

namespace {

struct Step {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<Leg> labels;
    std::size_t out_size = 1;
};

Step plan(const LabeledTensor& acc, const LabeledTensor& b) {
    Step st;
    std::vector<bool> used_b(b.labels.size(), false);
    for (std::size_t i = 0; i < acc.labels.size(); ++i) {
        bool hit = false;
        for (std::size_t k = 0; k < b.labels.size(); ++k)
            if (!used_b[k] && acc.labels[i] == b.labels[k]) {
                st.pairs.push_back({i, k});
                used_b[k] = true;
                hit = true;
                break;
            }
        if (!hit) {
            st.labels.push_back(acc.labels[i]);
            st.out_size *= acc.t.dim(i);
        }
    }
    for (std::size_t k = 0; k < b.labels.size(); ++k)
        if (!used_b[k]) {
            st.labels.push_back(b.labels[k]);
            st.out_size *= b.t.dim(k);
        }
    return st;
}

}  // namespace

LabeledTensor contract_sequence(const std::vector<LabeledTensor>& list, const std::vector<Leg>& order) {
    if (list.empty()) throw ContractError("contract_sequence: empty network");
    LabeledTensor acc = list.front();
    std::vector<bool> done(list.size(), false);
    done[0] = true;
    for (std::size_t n = 1; n < list.size(); ++n) {
        // connected tensor with the smallest result; the first pending one if none is connected
        std::size_t best = list.size();
        Step best_step;
        for (std::size_t c = 1; c < list.size(); ++c) {
            if (done[c]) continue;
            Step st = plan(acc, list[c]);
            if (st.pairs.empty()) {
                if (best == list.size()) {
                    best = c;
                    best_step = std::move(st);
                }
                continue;
            }
            if (best == list.size() || best_step.pairs.empty() || st.out_size < best_step.out_size) {
                best = c;
                best_step = std::move(st);
            }
        }
        done[best] = true;
        check_budget(best_step.out_size, "network contraction");
        acc.t = contract(acc.t, list[best].t, best_step.pairs);
        acc.labels = std::move(best_step.labels);
    }
    if (order.size() != acc.labels.size()) throw ContractError("contract_sequence: output legs do not match");
    std::vector<std::size_t> perm;
    for (const auto& l : order) {
        auto it = std::find(acc.labels.begin(), acc.labels.end(), l);
        if (it == acc.labels.end()) throw ContractError("contract_sequence: missing output leg");
        perm.push_back(std::size_t(it - acc.labels.begin()));
    }
    acc.t = acc.t.permute(perm);
    acc.labels = order;
    return acc;
}

}  // namespace rtm
