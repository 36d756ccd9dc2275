#include "hsusy/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hsusy/errors.hpp"

namespace hsusy {

namespace {

constexpr double kOverlapThreshold = 0.999;
constexpr double kRootTolerance = 1e-9;
// D^dag psi below this interior norm ends a ladder.
constexpr double kLadderEndNorm = 1e-2;

BandedOperator composed(const std::vector<BandedOperator>& ops, const Grid& grid) {
    if (ops.empty()) return BandedOperator::identity(grid);
    return compose(ops);
}

double product_of_gaps(const FactorizationConfig& config, double energy) {
    double p = 1.0;
    for (const auto& f : config.entries()) p *= energy - f.epsilon;
    return p;
}

}  // namespace

GridFunction OperatorChain::apply(const GridFunction& f) const {
    GridFunction out = f;
    for (auto it = factors.rbegin(); it != factors.rend(); ++it) out = it->apply(out);
    return out;
}

BandedOperator OperatorChain::expand(const Grid& grid) const { return composed(factors, grid); }

LadderOperatorSet build_ladder_set(const SuperpotentialTable& table) {
    const Grid& grid = table.grid();
    const std::size_t m = table.order();

    // B^dag = A_m^dag ... A_1^dag, B = A_1 ... A_m
    OperatorChain b_dagger;
    OperatorChain b;
    for (std::size_t i = m; i >= 1; --i) {
        b_dagger.factors.push_back(first_order_operator(table.diagonal(i), LadderSign::creation));
    }
    for (std::size_t i = 1; i <= m; ++i) {
        b.factors.push_back(first_order_operator(table.diagonal(i), LadderSign::annihilation));
    }

    const GridFunction x = GridFunction::sample(grid, [](double v) { return v; });
    BandedOperator a = first_order_operator(x, LadderSign::annihilation);
    BandedOperator a_dagger = first_order_operator(x, LadderSign::creation);

    OperatorChain d = b_dagger;
    d.factors.push_back(a);
    d.factors.insert(d.factors.end(), b.factors.begin(), b.factors.end());
    OperatorChain d_dagger = b_dagger;
    d_dagger.factors.push_back(a_dagger);
    d_dagger.factors.insert(d_dagger.factors.end(), b.factors.begin(), b.factors.end());

    BandedOperator h_tilde = build_hamiltonian(partner_potential(table, m).values);
    BandedOperator h0 = build_hamiltonian(oscillator_potential(grid));

    return {b_dagger.expand(grid), b.expand(grid),       std::move(a),
            std::move(a_dagger),   d.expand(grid),       d_dagger.expand(grid),
            std::move(h_tilde),    std::move(h0),        table.config(),
            std::move(b_dagger),   std::move(b),         std::move(d),
            std::move(d_dagger)};
}

double transpose_defect(const LadderOperatorSet& set) {
    const Grid& grid = set.d.grid();
    const std::size_t k = set.d.bandwidth();
    double worst = 0.0;
    double scale = 0.0;
    for (std::size_t i = grid.interior_first(); i <= grid.interior_last(); ++i) {
        const std::size_t lo = i >= k ? i - k : 0;
        const std::size_t hi = std::min(i + k, grid.size() - 1);
        for (std::size_t j = lo; j <= hi; ++j) {
            worst = std::max(worst, std::abs(set.d_dagger.at(i, j) - set.d.at(j, i)));
            scale = std::max(scale, std::abs(set.d.at(j, i)));
        }
    }
    return scale > 0.0 ? worst / scale : worst;
}

NumberPolynomial::NumberPolynomial(const FactorizationConfig& config) {
    roots_.push_back(0.5);
    for (const auto& f : config.entries()) {
        roots_.push_back(f.epsilon);
        roots_.push_back(f.epsilon + 1.0);
    }
    std::sort(roots_.begin(), roots_.end());
}

double NumberPolynomial::operator()(double energy) const {
    double p = 1.0;
    for (double r : roots_) p *= energy - r;
    return p;
}

double number_eval(const NumberPolynomial& poly, double energy) { return poly(energy); }

void ResidualReport::add(const EigenState& state, double residual) {
    entries.push_back({state.provenance.describe(), state.energy, residual});
    max_residual = std::max(max_residual, residual);
}

ResidualReport verify_intertwining(const LadderOperatorSet& set,
                                   const std::vector<EigenState>& test_states) {
    ResidualReport report{"intertwining", 0.0, {}};
    for (const auto& s : test_states) {
        const GridFunction mapped = set.b_dagger_chain.apply(s.wavefunction);
        GridFunction r = set.h_tilde.apply(mapped);
        r -= set.b_dagger_chain.apply(set.h0.apply(s.wavefunction));
        const double scale = interior_norm(mapped);
        report.add(s, scale > 0.0 ? interior_norm(r) / scale : interior_norm(r));
    }
    return report;
}

double AlgebraReport::max_residual() const {
    return std::max({lowering.max_residual, raising.max_residual, commutator.max_residual});
}

AlgebraReport verify_polynomial_algebra(const LadderOperatorSet& set,
                                        const std::vector<EigenState>& states) {
    const NumberPolynomial poly(set.config);
    AlgebraReport report{{"[H,D]=-D", 0.0, {}}, {"[H,D^dag]=D^dag", 0.0, {}},
                         {"[D,D^dag]=N(H+1)-N(H)", 0.0, {}}};
    for (const auto& s : states) {
        const GridFunction& psi = s.wavefunction;
        const GridFunction h_psi = set.h_tilde.apply(psi);

        const GridFunction d_psi = set.d_chain.apply(psi);
        GridFunction lower = set.h_tilde.apply(d_psi);
        lower -= set.d_chain.apply(h_psi);
        lower += d_psi;
        report.lowering.add(s, interior_norm(lower) / (1.0 + interior_norm(d_psi)));

        const GridFunction dd_psi = set.d_dagger_chain.apply(psi);
        GridFunction raise = set.h_tilde.apply(dd_psi);
        raise -= set.d_dagger_chain.apply(h_psi);
        raise -= dd_psi;
        report.raising.add(s, interior_norm(raise) / (1.0 + interior_norm(dd_psi)));

        const double measured =
            inner_product(psi, set.d_chain.apply(dd_psi)) - inner_product(psi, set.d_dagger_chain.apply(d_psi));
        const double expected = poly(s.energy + 1.0) - poly(s.energy);
        report.commutator.add(s, std::abs(measured - expected) / (1.0 + std::abs(expected)));
    }
    return report;
}

ResidualReport verify_number_operator(const LadderOperatorSet& set,
                                      const std::vector<EigenState>& states) {
    const NumberPolynomial poly(set.config);
    ResidualReport report{"D^dag D = N(H)", 0.0, {}};
    for (const auto& s : states) {
        const double measured =
            inner_product(s.wavefunction, set.d_dagger_chain.apply(set.d_chain.apply(s.wavefunction)));
        const double expected = poly(s.energy);
        report.add(s, std::abs(measured - expected) / (1.0 + std::abs(expected)));
    }
    return report;
}

AnnihilationReport verify_annihilation(const LadderOperatorSet& set,
                                       const std::vector<EigenState>& states) {
    AnnihilationReport report{{"||D psi||", 0.0, {}}, {"||D^dag psi||", 0.0, {}}};
    for (const auto& s : states) {
        report.by_d.add(s, interior_norm(set.d_chain.apply(s.wavefunction)));
        report.by_d_dagger.add(s, interior_norm(set.d_dagger_chain.apply(s.wavefunction)));
    }
    return report;
}

LinearizedAction linearized_action(const LadderOperatorSet& set,
                                   const std::vector<EigenState>& basis,
                                   LadderDirection direction, int n) {
    auto find = [&](int index) -> const EigenState* {
        for (const auto& s : basis) {
            if (s.provenance.kind != Provenance::Kind::missing && s.provenance.n == index) return &s;
        }
        return nullptr;
    };
    const EigenState* source = find(n);
    if (source == nullptr) {
        throw DomainError("linearized_action: basis has no state with n = " + std::to_string(n));
    }
    const double e_n = n + 0.5;

    if (direction == LadderDirection::lower && n == 0) {
        const double residue = interior_norm(set.d_chain.apply(source->wavefunction));
        return {residue, -1, 0.0, 1};
    }

    const int target_index = direction == LadderDirection::lower ? n - 1 : n + 1;
    const EigenState* target = find(target_index);
    if (target == nullptr) {
        throw DomainError("linearized_action: basis does not cover n = " + std::to_string(target_index));
    }

    // Bracket of the linearized operators on the oscillator number eigenvalue:
    // lower acts with N = n - 1, raise with N = n.
    const double bracket =
        direction == LadderDirection::lower
            ? product_of_gaps(set.config, e_n - 1.0) * product_of_gaps(set.config, e_n)
            : product_of_gaps(set.config, e_n) * product_of_gaps(set.config, e_n + 1.0);
    if (!(bracket > 0.0)) {
        throw DomainError("linearized_action: non-positive bracket (E_n meets a factorization energy)");
    }
    const OperatorChain& op = direction == LadderDirection::lower ? set.d_chain : set.d_dagger_chain;
    GridFunction image = op.apply(source->wavefunction);
    image *= 1.0 / std::sqrt(bracket);

    const double image_norm = norm(image);
    double best = 0.0;
    const EigenState* best_state = nullptr;
    for (const auto& s : basis) {
        const double c = std::abs(inner_product(s.wavefunction, image));
        if (c > best) {
            best = c;
            best_state = &s;
        }
    }
    const double raw = inner_product(target->wavefunction, image);
    const double overlap = image_norm > 0.0 ? std::abs(raw) / image_norm : 0.0;
    if (best_state != target || overlap < kOverlapThreshold) {
        std::ostringstream os;
        os << "linearized_action: image of n = " << n << " does not land on n = " << target_index
           << " (overlap " << overlap << ")";
        throw OverlapError(os.str());
    }
    return {std::abs(raw), target_index, overlap, raw >= 0.0 ? 1 : -1};
}

namespace {

struct Block {
    GridFunction upper;
    GridFunction lower;
};

// Q = [[0,0],[B,0]], Q^dag = [[0,B^dag],[0,0]]
Block apply_q(const LadderOperatorSet& set, const Block& v) {
    return {GridFunction(v.upper.grid()), set.b_chain.apply(v.upper)};
}

Block apply_q_dagger(const LadderOperatorSet& set, const Block& v) {
    return {set.b_dagger_chain.apply(v.lower), GridFunction(v.lower.grid())};
}

Block add(Block a, const Block& b, double s = 1.0) {
    a.upper += s * b.upper;
    a.lower += s * b.lower;
    return a;
}

double block_norm(const Block& v) {
    return std::hypot(interior_norm(v.upper), interior_norm(v.lower));
}

double block_dot(const Block& a, const Block& b) {
    return inner_product(a.upper, b.upper) + inner_product(a.lower, b.lower);
}

}  // namespace

SusyBlockReport verify_susy_block(const LadderOperatorSet& set,
                                  const std::vector<BlockTestVector>& blocks) {
    SusyBlockReport report{{"{Q_i,Q_j} = delta_ij H_ss", 0.0, {}},
                           {"H_ss = prod (H^p - eps_i)", 0.0, {}},
                           {"H_ss eigenvalue", 0.0, {}}};
    for (const auto& t : blocks) {
        const Grid& grid = t.upper.wavefunction.grid();
        const Block v{t.upper.wavefunction,
                      t.lower ? t.lower->wavefunction : GridFunction(grid)};

        // H_ss = diag(B^dag B, B B^dag)
        const Block hss{set.b_dagger_chain.apply(set.b_chain.apply(v.upper)),
                        set.b_chain.apply(set.b_dagger_chain.apply(v.lower))};
        const double scale = 1.0 + block_norm(hss);

        // With Q1 = (Q^dag + Q)/sqrt2 and Q2 = (Q^dag - Q)/(i sqrt2):
        // {Q1,Q2} = -(i/2) [(Q^dag+Q)(Q^dag-Q) + (Q^dag-Q)(Q^dag+Q)],
        // {Q1,Q1} = (Q^dag+Q)^2, {Q2,Q2} = -(Q^dag-Q)^2.
        const Block plus = add(apply_q_dagger(set, v), apply_q(set, v));
        const Block minus = add(apply_q_dagger(set, v), apply_q(set, v), -1.0);
        const Block plus_plus = add(apply_q_dagger(set, plus), apply_q(set, plus));
        const Block plus_minus = add(apply_q_dagger(set, minus), apply_q(set, minus));
        const Block minus_plus = add(apply_q_dagger(set, plus), apply_q(set, plus), -1.0);
        const Block minus_minus = add(apply_q_dagger(set, minus), apply_q(set, minus), -1.0);

        const double mixed = 0.5 * block_norm(add(plus_minus, minus_plus));
        const double q1q1 = block_norm(add(plus_plus, hss, -1.0));
        Block q2q2 = minus_minus;
        q2q2.upper *= -1.0;
        q2q2.lower *= -1.0;
        const double q2 = block_norm(add(q2q2, hss, -1.0));
        report.anticommutator.add(t.upper, std::max({mixed, q1q1, q2}) / scale);

        // prod_i (H^p - eps_i) v, applied factor by factor
        Block poly = v;
        for (const auto& f : set.config.entries()) {
            Block next{set.h_tilde.apply(poly.upper), set.h0.apply(poly.lower)};
            next = add(next, poly, -f.epsilon);
            poly = std::move(next);
        }
        report.polynomial.add(t.upper, block_norm(add(hss, poly, -1.0)) / scale);

        const bool matched = !t.lower || std::abs(t.lower->energy - t.upper.energy) < 1e-12;
        if (matched) {
            const double expected = product_of_gaps(set.config, t.upper.energy);
            const double rayleigh = block_dot(v, hss) / block_dot(v, v);
            report.eigenvalue.add(t.upper, std::abs(rayleigh - expected) / std::max(1.0, std::abs(expected)));
        }
    }
    return report;
}

std::string LadderStructure::describe() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < ladders.size(); ++i) {
        if (i) os << ", ";
        os << "[" << ladders[i].start_energy << ", ";
        if (ladders[i].length) {
            os << "length " << *ladders[i].length;
        } else {
            os << "infinite";
        }
        os << "]";
    }
    return os.str();
}

LadderStructure analyze_ladder_structure(const std::vector<double>& roots,
                                         const std::vector<bool>& normalizable_flags) {
    if (roots.size() != normalizable_flags.size()) {
        throw DomainError("analyze_ladder_structure: roots and flags differ in length");
    }
    for (std::size_t i = 0; i < roots.size(); ++i) {
        for (std::size_t j = i + 1; j < roots.size(); ++j) {
            if (normalizable_flags[i] && normalizable_flags[j] &&
                std::abs(roots[i] - roots[j]) < kRootTolerance) {
                throw DomainError("analyze_ladder_structure: duplicate root " + std::to_string(roots[i]));
            }
        }
    }
    LadderStructure out;
    for (std::size_t j = 0; j < roots.size(); ++j) {
        if (!normalizable_flags[j]) continue;
        std::optional<int> length;
        for (std::size_t k = 0; k < roots.size(); ++k) {
            if (normalizable_flags[k]) continue;
            const double gap = roots[k] - roots[j];
            const double l = std::round(gap);
            if (l >= 1.0 && std::abs(gap - l) < kRootTolerance) {
                const int li = static_cast<int>(l);
                if (!length || li < *length) length = li;
            }
        }
        out.ladders.push_back({roots[j], length});
    }
    std::sort(out.ladders.begin(), out.ladders.end(),
              [](const Ladder& a, const Ladder& b) { return a.start_energy < b.start_energy; });
    return out;
}

RootSet number_root_flags(const FactorizationConfig& config, const std::vector<EigenState>& spectrum) {
    auto has = [&](Provenance::Kind kind, int n, std::size_t index) {
        return std::any_of(spectrum.begin(), spectrum.end(), [&](const EigenState& s) {
            if (s.provenance.kind != kind || !s.normalizable) return false;
            return kind == Provenance::Kind::missing ? s.provenance.missing_index == index
                                                     : s.provenance.n == n;
        });
    };
    auto occupied = [&](double energy) {
        return std::any_of(spectrum.begin(), spectrum.end(), [&](const EigenState& s) {
            return s.normalizable && std::abs(s.energy - energy) < kRootTolerance;
        });
    };
    RootSet out;
    out.roots.push_back(0.5);
    out.normalizable.push_back(has(Provenance::Kind::transformed, 0, 0) ||
                               has(Provenance::Kind::oscillator, 0, 0));
    for (std::size_t i = 1; i <= config.size(); ++i) {
        out.roots.push_back(config.epsilon(i));
        out.normalizable.push_back(has(Provenance::Kind::missing, -1, i));
        // eps_i + 1 only starts a ladder when the level below it was deleted (eps_1 = 1/2)
        const double upper = config.epsilon(i) + 1.0;
        out.roots.push_back(upper);
        out.normalizable.push_back(occupied(upper) && !occupied(config.epsilon(i)));
    }
    return out;
}

LadderStructure spectrum_ladders(const LadderOperatorSet& set,
                                 const std::vector<EigenState>& spectrum) {
    const std::size_t count = spectrum.size();
    std::vector<bool> raised(count, false);  // D^dag psi does not vanish
    for (std::size_t a = 0; a < count; ++a) {
        raised[a] = interior_norm(set.d_dagger_chain.apply(spectrum[a].wavefunction)) > kLadderEndNorm;
    }
    auto successor = [&](std::size_t a) -> std::optional<std::size_t> {
        if (!raised[a]) return std::nullopt;
        for (std::size_t b = 0; b < count; ++b) {
            if (std::abs(spectrum[b].energy - spectrum[a].energy - 1.0) < kRootTolerance) return b;
        }
        return std::nullopt;
    };
    double top_energy = -std::numeric_limits<double>::infinity();
    for (const auto& s : spectrum) top_energy = std::max(top_energy, s.energy);
    std::vector<std::optional<std::size_t>> next(count);
    std::vector<bool> reached(count, false);
    for (std::size_t a = 0; a < count; ++a) {
        next[a] = successor(a);
        if (next[a]) reached[*next[a]] = true;
    }
    LadderStructure out;
    for (std::size_t a = 0; a < count; ++a) {
        if (reached[a]) continue;
        int length = 1;
        std::size_t cur = a;
        while (next[cur]) {
            cur = *next[cur];
            ++length;
        }
        // a tower that reaches the top of the assembled window goes on
        const bool infinite = spectrum[cur].energy + 1.0 > top_energy + kRootTolerance;
        out.ladders.push_back({spectrum[a].energy, infinite ? std::nullopt : std::optional<int>(length)});
    }
    std::sort(out.ladders.begin(), out.ladders.end(),
              [](const Ladder& x, const Ladder& y) { return x.start_energy < y.start_energy; });
    return out;
}

bool same_structure(const LadderStructure& a, const LadderStructure& b, double energy_tol) {
    if (a.ladders.size() != b.ladders.size()) return false;
    for (std::size_t i = 0; i < a.ladders.size(); ++i) {
        if (std::abs(a.ladders[i].start_energy - b.ladders[i].start_energy) > energy_tol) return false;
        if (a.ladders[i].length != b.ladders[i].length) return false;
    }
    return true;
}

}  // namespace hsusy
