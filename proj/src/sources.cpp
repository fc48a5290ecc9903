#include "qlink/sources.hpp"

#include <cmath>

#include "qlink/errors.hpp"

namespace qlink {

namespace {

EmitResult finalize_pure(FockState psi, double exact_norm_sq) {
    // exact_norm_sq is the untruncated norm^2 of the construction; whatever
    // the truncated map is missing was cut off by n_max.
    const double kept = psi.norm_squared();
    const double leak = std::max(0.0, exact_norm_sq - kept) / exact_norm_sq;
    if (leak > kEmitLeakTolerance)
        throw sim_error("emit: truncation too small for requested source strength (leaked " +
                        std::to_string(leak) + ")");
    psi.normalize();
    EmitResult res{MixedState(std::move(psi)), 1.0, leak};
    return res;
}

EmitResult emit_coherent(const Coherent& src, const ModeLabel& mode, Truncation tr) {
    if (src.mu < 0.0) throw std::invalid_argument("emit: mu must be >= 0");
    const double alpha = std::sqrt(src.mu);
    AmplitudeMap amps;
    for (int n = 0; n <= tr.n_max; ++n) {
        const double a = std::exp(-src.mu / 2.0) * std::pow(alpha, n) / std::sqrt(factorial(n));
        const Occupation key(1, static_cast<std::uint8_t>(n));
        amps[key] = a;
    }
    FockState psi = FockState::from_amplitudes({mode}, tr, std::move(amps));
    return finalize_pure(std::move(psi), 1.0);
}

EmitResult emit_spdc(const SpdcPair& src, const ModeLabel& signal, const ModeLabel& idler,
                     Truncation tr) {
    if (src.p < 0.0 || src.p >= 1.0) throw std::invalid_argument("emit: pair probability out of [0,1)");
    AmplitudeMap amps;
    for (int n = 0; n <= tr.n_max; ++n) {
        const double a = std::sqrt(1.0 - src.p) * std::pow(src.p, n / 2.0);
        const Occupation key(2, static_cast<std::uint8_t>(n));
        amps[key] = a;
    }
    FockState psi = FockState::from_amplitudes({signal, idler}, tr, std::move(amps));
    return finalize_pure(std::move(psi), 1.0);
}

EmitResult emit_polarization_pair(const PolarizationEntangledPair& src, const ModeLabel& a,
                                  const ModeLabel& b, Truncation tr) {
    if (a.pol != Pol::none || b.pol != Pol::none)
        throw std::invalid_argument("emit: polarization pair targets must be base labels");
    if (src.p < 0.0 || src.p >= 1.0) throw std::invalid_argument("emit: pair probability out of [0,1)");
    // exp[sqrt(p) (a_h^dag b_v^dag - a_v^dag b_h^dag)] |0> expands to
    //   sum_k p^(k/2) sum_j (-1)^(k-j) |j, k-j>_a |k-j, j>_b,
    // normalized by (1-p); k=1 is the singlet term.
    AmplitudeMap amps;
    for (int k = 0; k <= 2 * tr.n_max; ++k) {
        for (int j = 0; j <= k; ++j) {
            const int jc = k - j;
            if (j > tr.n_max || jc > tr.n_max) continue;
            const double sign = (jc % 2 == 0) ? 1.0 : -1.0;
            amps[{static_cast<std::uint8_t>(j), static_cast<std::uint8_t>(jc),
                  static_cast<std::uint8_t>(jc), static_cast<std::uint8_t>(j)}] =
                (1.0 - src.p) * std::pow(src.p, k / 2.0) * sign;
        }
    }
    FockState psi = FockState::from_amplitudes(
        {mode_h(a.base), mode_v(a.base), mode_h(b.base), mode_v(b.base)}, tr, std::move(amps));
    return finalize_pure(std::move(psi), 1.0);
}

EmitResult emit_on_demand(const OnDemandSps& src, const ModeLabel& mode, Truncation tr) {
    if (src.p1 < 0.0 || src.p1 > 1.0 || src.p2 < 0.0 || src.p2 > src.p1 ||
        src.p1 + src.p2 > 1.0)
        throw std::invalid_argument("emit: on-demand probabilities must satisfy p2 <= p1 and p1+p2 <= 1");
    if (src.p2 > 0.0 && tr.n_max < 2)
        throw sim_error("emit: n_max < 2 cannot hold the two-photon component");
    std::vector<ModeLabel> reg = {mode};
    std::vector<MixedState::Branch> branches;
    const double p0 = 1.0 - src.p1 - src.p2;
    if (p0 > 0.0) branches.push_back({p0, FockState::basis(reg, tr, {0})});
    if (src.p1 > 0.0) branches.push_back({src.p1, FockState::basis(reg, tr, {1})});
    if (src.p2 > 0.0) branches.push_back({src.p2, FockState::basis(reg, tr, {2})});
    return {MixedState(std::move(branches)), 1.0, 0.0};
}

EmitResult emit_heralded(const HeraldedSps& src, const ModeLabel& mode, Truncation tr) {
    const ModeLabel herald_mode(mode.str() + "__herald");
    EmitResult spdc = emit_spdc(SpdcPair{src.p}, mode, herald_mode, tr);
    const int want = 1;  // threshold: click; number-resolving: exactly one count
    MeasureResult m = measure_povm(spdc.state, {herald_mode}, src.herald_detector, {want});
    if (!m.state)
        throw sim_error("emit: heralded source never fires (herald probability ~ 0)");
    MixedState cond = partial_trace(*m.state, {herald_mode});
    return {std::move(cond), m.probability, spdc.leaked_mass};
}

} // namespace

EmitResult emit(const SourceModel& source, const std::vector<ModeLabel>& modes,
                Truncation truncation) {
    return std::visit(
        [&](const auto& src) -> EmitResult {
            using T = std::decay_t<decltype(src)>;
            if constexpr (std::is_same_v<T, Coherent>) {
                if (modes.size() != 1)
                    throw std::invalid_argument("emit: coherent source takes one mode");
                return emit_coherent(src, modes[0], truncation);
            } else if constexpr (std::is_same_v<T, SpdcPair>) {
                if (modes.size() != 2)
                    throw std::invalid_argument("emit: pair source takes two modes");
                return emit_spdc(src, modes[0], modes[1], truncation);
            } else if constexpr (std::is_same_v<T, PolarizationEntangledPair>) {
                if (modes.size() != 2)
                    throw std::invalid_argument(
                        "emit: polarization pair source takes two base modes");
                return emit_polarization_pair(src, modes[0], modes[1], truncation);
            } else if constexpr (std::is_same_v<T, HeraldedSps>) {
                if (modes.size() != 1)
                    throw std::invalid_argument("emit: heralded source takes one mode");
                return emit_heralded(src, modes[0], truncation);
            } else {
                if (modes.size() != 1)
                    throw std::invalid_argument("emit: on-demand source takes one mode");
                return emit_on_demand(src, modes[0], truncation);
            }
        },
        source);
}

double g2_zero(const MixedState& s, const ModeLabel& m) {
    const double n_mean = s.mean_photon_number(m);
    if (n_mean < 1e-15)
        throw sim_error("g2_zero: undefined on (near-)vacuum input");
    return s.mean_n_n_minus_1(m) / (n_mean * n_mean);
}

} // namespace qlink
