#include "qlink/diqkd.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "qlink/errors.hpp"

namespace qlink {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double binary_entropy(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

struct ChshTerms {
    // x-z blocks of the correlation matrix and Bloch vectors.
    double txx, txz, tzx, tzz;
    double rax, raz, rbx, rbz;
};

ChshTerms chsh_terms(const TwoQubitState& state) {
    const Eigen::Matrix3d t = state.correlation_matrix();
    const Eigen::Vector3d ra = state.bloch_a();
    const Eigen::Vector3d rb = state.bloch_b();
    return {t(0, 0), t(0, 2), t(2, 0), t(2, 2), ra(0), ra(2), rb(0), rb(2)};
}

double correlation(const ChshTerms& c, double a, double b, double eta) {
    const double ax = std::sin(a), az = std::cos(a);
    const double bx = std::sin(b), bz = std::cos(b);
    const double quantum = ax * (c.txx * bx + c.txz * bz) + az * (c.tzx * bx + c.tzz * bz);
    const double marg_a = ax * c.rax + az * c.raz;
    const double marg_b = bx * c.rbx + bz * c.rbz;
    return eta * eta * quantum + eta * (1.0 - eta) * (marg_a + marg_b) +
           (1.0 - eta) * (1.0 - eta);
}

double chsh_from_terms(const ChshTerms& c, const ChshSettings& s, double eta) {
    return correlation(c, s.a1, s.b1, eta) + correlation(c, s.a1, s.b2, eta) +
           correlation(c, s.a2, s.b1, eta) - correlation(c, s.a2, s.b2, eta);
}

} // namespace

double chsh_value(const TwoQubitState& state, const ChshSettings& settings, double eta) {
    if (eta < 0.0 || eta > 1.0)
        throw std::invalid_argument("chsh_value: detection efficiency out of [0,1]");
    return chsh_from_terms(chsh_terms(state), settings, eta);
}

std::pair<ChshSettings, double> optimize_chsh(const TwoQubitState& state, double eta) {
    if (eta < 0.0 || eta > 1.0)
        throw std::invalid_argument("optimize_chsh: detection efficiency out of [0,1]");
    const ChshTerms c = chsh_terms(state);

    constexpr int kGrid = 180;  // 2 degree step
    std::array<double, kGrid> sa, ca;
    for (int k = 0; k < kGrid; ++k) {
        const double th = kTwoPi * k / kGrid;
        sa[static_cast<std::size_t>(k)] = std::sin(th);
        ca[static_cast<std::size_t>(k)] = std::cos(th);
    }
    auto angle = [](int k) { return kTwoPi * k / kGrid; };

    // S(a1,a2,b1,b2) = eta^2 [(a1+a2)^T T b1 + (a1-a2)^T T b2]
    //                + 2 eta(1-eta) [a1.rA + b1.rB] + 2(1-eta)^2,
    // so for fixed (a1, a2) the two b angles maximize independently.
    ChshSettings best;
    double best_s = -1e300;
    const double ee = eta * eta;
    const double em = eta * (1.0 - eta);
    for (int i1 = 0; i1 < kGrid; ++i1) {
        const double a1x = sa[static_cast<std::size_t>(i1)], a1z = ca[static_cast<std::size_t>(i1)];
        for (int i2 = 0; i2 < kGrid; ++i2) {
            const double sx = a1x + sa[static_cast<std::size_t>(i2)];
            const double sz = a1z + ca[static_cast<std::size_t>(i2)];
            const double dx = a1x - sa[static_cast<std::size_t>(i2)];
            const double dz = a1z - ca[static_cast<std::size_t>(i2)];
            // coefficients of (bx, bz) in each b-term
            const double w1x = ee * (sx * c.txx + sz * c.tzx) + 2.0 * em * c.rbx;
            const double w1z = ee * (sx * c.txz + sz * c.tzz) + 2.0 * em * c.rbz;
            const double w2x = ee * (dx * c.txx + dz * c.tzx);
            const double w2z = ee * (dx * c.txz + dz * c.tzz);
            int best_j1 = 0, best_j2 = 0;
            double g1 = -1e300, g2 = -1e300;
            for (int j = 0; j < kGrid; ++j) {
                const double v1 = w1x * sa[static_cast<std::size_t>(j)] + w1z * ca[static_cast<std::size_t>(j)];
                if (v1 > g1) { g1 = v1; best_j1 = j; }
                const double v2 = w2x * sa[static_cast<std::size_t>(j)] + w2z * ca[static_cast<std::size_t>(j)];
                if (v2 > g2) { g2 = v2; best_j2 = j; }
            }
            const double s = g1 + g2 + 2.0 * em * (a1x * c.rax + a1z * c.raz) +
                             2.0 * (1.0 - eta) * (1.0 - eta);
            if (s > best_s) {
                best_s = s;
                best = {angle(i1), angle(i2), angle(best_j1), angle(best_j2),
                        NoClickPolicy::assign_plus_one};
            }
        }
    }

    // Local refinement: per-coordinate pattern search with step halving.
    double step = kTwoPi / kGrid / 2.0;
    while (step > 1e-4) {
        bool improved = true;
        while (improved) {
            improved = false;
            for (double* ang : {&best.a1, &best.a2, &best.b1, &best.b2}) {
                for (double delta : {step, -step}) {
                    *ang += delta;
                    const double s = chsh_from_terms(c, best, eta);
                    if (s > best_s) {
                        best_s = s;
                        improved = true;
                    } else {
                        *ang -= delta;
                    }
                }
            }
        }
        step /= 2.0;
    }
    return {best, best_s};
}

double detection_threshold() {
    const TwoQubitState singlet = TwoQubitState::singlet();
    auto s_of = [&](double eta) { return optimize_chsh(singlet, eta).second; };
    double lo = 0.5, hi = 1.0;
    if (s_of(hi) <= 2.0) throw sim_error("detection_threshold: no violation at eta = 1");
    while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        (s_of(mid) > 2.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

double binned_qber(const TwoQubitState& state, double eta) {
    const ChshTerms c = chsh_terms(state);
    // Both sides measure along z; a missed detection counts as +1.
    const double ez = eta * eta * c.tzz + eta * (1.0 - eta) * (c.raz + c.rbz) +
                      (1.0 - eta) * (1.0 - eta);
    const double q = (1.0 - std::abs(ez)) / 2.0;
    return std::min(std::max(q, 0.0), 0.5);
}

double di_key_rate(double s_value, double qber, double heralded_rate_hz) {
    if (qber < 0.0 || qber >= 0.5)
        throw std::invalid_argument("di_key_rate: qber out of [0, 0.5)");
    if (heralded_rate_hz < 0.0)
        throw std::invalid_argument("di_key_rate: negative rate");
    if (s_value > 2.0 * std::numbers::sqrt2 + 1e-9)
        throw std::invalid_argument("di_key_rate: S above the Tsirelson bound");
    if (s_value <= 2.0) return 0.0;
    const double s = std::min(s_value, 2.0 * std::numbers::sqrt2);
    const double eve = binary_entropy((1.0 + std::sqrt(s * s / 4.0 - 1.0)) / 2.0);
    const double fraction = 1.0 - binary_entropy(qber) - eve;
    return heralded_rate_hz * std::max(0.0, fraction);
}

void HeraldSchemeParams::validate() const {
    for (double p : {pair_p, bs_transmission, coupling, on_demand_p1, on_demand_p2,
                     heralded_sps_p})
        if (p < 0.0 || p > 1.0)
            throw std::invalid_argument("herald params: probabilities must lie in [0,1]");
    if (repetition_rate_hz <= 0.0)
        throw std::invalid_argument("herald params: repetition rate must be > 0");
    if (on_demand_p1 + on_demand_p2 > 1.0 || on_demand_p2 > on_demand_p1)
        throw std::invalid_argument("herald params: need p2 <= p1 and p1 + p2 <= 1");
}

HeraldOutcome run_herald_circuit(const HeraldSchemeParams& params, Truncation truncation) {
    params.validate();
    if (truncation.n_max < 2)
        throw std::invalid_argument("run_herald_circuit: truncation must be >= 2");

    // Entangled pair on (a, b); Bob's photons start in the kept modes d_h/d_v
    // and are tapped toward c_h/c_v.
    EmitResult pair = emit(PolarizationEntangledPair{params.pair_p},
                           {ModeLabel("a"), ModeLabel("b")}, truncation);

    double source_ready = 1.0;
    SourceModel bob_source;
    if (params.on_demand)
        bob_source = OnDemandSps{params.on_demand_p1, params.on_demand_p2};
    else
        bob_source = HeraldedSps{params.heralded_sps_p, params.station_detectors};
    EmitResult bob_h = emit(bob_source, {mode_h("d")}, truncation);
    EmitResult bob_v = emit(bob_source, {mode_v("d")}, truncation);
    source_ready = bob_h.herald_probability * bob_v.herald_probability;

    MixedState state = tensor_product(pair.state, tensor_product(bob_h.state, bob_v.state));
    state = tensor_product(state,
                           MixedState(FockState({mode_h("c"), mode_v("c")}, truncation)));

    // Collection losses, then the fiber on b.
    const double fiber = channel_transmission(params.channel);
    state = apply_loss(state, mode_h("b"), params.coupling * fiber);
    state = apply_loss(state, mode_v("b"), params.coupling * fiber);
    state = apply_loss(state, mode_h("d"), params.coupling);
    state = apply_loss(state, mode_v("d"), params.coupling);

    // Tap: amplitude sqrt(bs_transmission) of each kept photon goes to c.
    state = apply_beamsplitter(state, mode_h("c"), mode_h("d"), 1.0 - params.bs_transmission);
    state = apply_beamsplitter(state, mode_v("c"), mode_v("d"), 1.0 - params.bs_transmission);

    state = apply_pbs_rotated(state, "b", "c");

    const std::vector<ModeLabel> ports = {ModeLabel(kPbsOutPlus), ModeLabel(kPbsOutMinus),
                                          ModeLabel(kPbsOutTildePlus),
                                          ModeLabel(kPbsOutTildeMinus)};
    MeasureResult herald = measure_povm(state, ports, params.station_detectors, {1, 0, 1, 0});
    const double herald_prob = source_ready * herald.probability;
    if (herald_prob < 1e-15 || !herald.state)
        throw sim_error("run_herald_circuit: degenerate parameters (herald probability ~ 0)");

    MixedState kept = partial_trace(*herald.state, ports);

    HeraldOutcome out;
    out.herald_probability = herald_prob;
    out.source_ready_probability = source_ready;
    out.conditional_state = extract_two_qubit_state(kept, "a", "d");
    out.fidelity_to_bell = fully_entangled_fraction(out.conditional_state);
    out.heralded_rate_hz = params.repetition_rate_hz * herald_prob;
    return out;
}

std::vector<DiqkdRatePoint> rate_vs_distance(const HeraldSchemeParams& base,
                                             const std::vector<double>& distances_km,
                                             Truncation truncation, double di_eff,
                                             double trusted_eff) {
    std::vector<DiqkdRatePoint> rows;
    for (double length : distances_km) {
        for (bool on_demand : {false, true}) {
            for (bool trusted : {false, true}) {
                const double eta = trusted ? trusted_eff : di_eff;
                HeraldSchemeParams p = base;
                p.channel.length_km = length;
                p.on_demand = on_demand;
                p.station_detectors.efficiency = eta;
                const HeraldOutcome h = run_herald_circuit(p, truncation);

                DiqkdRatePoint row;
                row.distance_km = length;
                row.variant = on_demand ? "on_demand" : "heralded";
                row.detection_eff = eta;
                row.herald_prob = h.herald_probability;
                const double sub = h.conditional_state.subspace_probability;
                if (trusted) {
                    // Detectors outside the adversary's reach: Alice and Bob
                    // post-select double detections, so the CHSH test runs at
                    // unit efficiency and eta^2 (and the off-subspace mass)
                    // reduce only the rate.
                    const auto [settings, s] = optimize_chsh(h.conditional_state, 1.0);
                    (void)settings;
                    row.s_value = s;
                    row.qber = binned_qber(h.conditional_state, 1.0);
                    row.key_rate_bits_per_s = di_key_rate(
                        row.s_value, row.qber, h.heralded_rate_hz * eta * eta * sub);
                } else {
                    // Fully device independent: no-detection events are binned
                    // as +1. Off-subspace herald events carry no photon pair;
                    // both sides then report +1, contributing 2 to S and no
                    // key-basis errors.
                    const auto [settings, s] = optimize_chsh(h.conditional_state, eta);
                    (void)settings;
                    row.s_value = sub * s + (1.0 - sub) * 2.0;
                    row.qber = sub * binned_qber(h.conditional_state, eta);
                    row.key_rate_bits_per_s =
                        di_key_rate(row.s_value, row.qber, h.heralded_rate_hz);
                }
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

} // namespace qlink
