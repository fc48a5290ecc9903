#include "qlink/fock.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <sstream>

#include "qlink/errors.hpp"

namespace qlink {

std::string ModeLabel::str() const {
    switch (pol) {
        case Pol::h: return base + "_h";
        case Pol::v: return base + "_v";
        default: return base;
    }
}

Truncation::Truncation(int n) : n_max(n) {
    if (n < 1) throw std::invalid_argument("Truncation: n_max must be >= 1");
}

double factorial(int n) {
    static const auto table = [] {
        std::array<double, 65> t{};
        t[0] = 1.0;
        for (int i = 1; i < 65; ++i) t[i] = t[i - 1] * i;
        return t;
    }();
    if (n < 0 || n >= static_cast<int>(table.size()))
        throw std::invalid_argument("factorial: out of range");
    return table[n];
}

namespace {

void check_registry(const std::vector<ModeLabel>& registry) {
    std::set<ModeLabel> seen;
    for (const auto& m : registry) {
        if (!seen.insert(m).second)
            throw std::invalid_argument("duplicate mode label '" + m.str() + "' in registry");
    }
}

} // namespace

FockState::FockState(std::vector<ModeLabel> registry, Truncation truncation,
                     double amplitude_prune)
    : registry_(std::move(registry)), n_max_(truncation.n_max), amp_prune_(amplitude_prune) {
    check_registry(registry_);
    amps_[Occupation(registry_.size(), 0)] = 1.0;
}

FockState FockState::basis(std::vector<ModeLabel> registry, Truncation truncation,
                           const Occupation& occ) {
    FockState s(std::move(registry), truncation);
    if (occ.size() != s.registry_.size())
        throw std::invalid_argument("basis: occupation arity does not match registry");
    for (auto n : occ)
        if (n > s.n_max_) throw std::invalid_argument("basis: occupation exceeds n_max");
    s.amps_.clear();
    s.amps_[occ] = 1.0;
    return s;
}

FockState FockState::from_amplitudes(std::vector<ModeLabel> registry, Truncation truncation,
                                     AmplitudeMap amps, double amplitude_prune) {
    FockState s(std::move(registry), truncation, amplitude_prune);
    for (const auto& [occ, amp] : amps) {
        (void)amp;
        if (occ.size() != s.registry_.size())
            throw std::invalid_argument("from_amplitudes: occupation arity mismatch");
        for (auto n : occ)
            if (n > s.n_max_)
                throw std::invalid_argument("from_amplitudes: occupation exceeds n_max");
    }
    s.amps_ = std::move(amps);
    s.drop_small_amplitudes();
    return s;
}

bool FockState::has_mode(const ModeLabel& m) const {
    return std::find(registry_.begin(), registry_.end(), m) != registry_.end();
}

std::size_t FockState::mode_index(const ModeLabel& m) const {
    auto it = std::find(registry_.begin(), registry_.end(), m);
    if (it == registry_.end())
        throw std::invalid_argument("unknown mode '" + m.str() + "'");
    return static_cast<std::size_t>(it - registry_.begin());
}

Complex FockState::amplitude(const Occupation& occ) const {
    auto it = amps_.find(occ);
    return it == amps_.end() ? Complex{0.0, 0.0} : it->second;
}

double FockState::norm_squared() const {
    double n = 0.0;
    for (const auto& [occ, amp] : amps_) {
        (void)occ;
        n += std::norm(amp);
    }
    return n;
}

void FockState::normalize() {
    const double n2 = norm_squared();
    if (n2 <= 0.0) throw sim_error("normalize: zero-norm state");
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& [occ, amp] : amps_) {
        (void)occ;
        amp *= inv;
    }
}

void FockState::drop_small_amplitudes() {
    for (auto it = amps_.begin(); it != amps_.end();) {
        if (std::abs(it->second) < amp_prune_) {
            pruned_mass_ += std::norm(it->second);
            it = amps_.erase(it);
        } else {
            ++it;
        }
    }
}

double FockState::mean_photon_number(const ModeLabel& m) const {
    const std::size_t k = mode_index(m);
    double acc = 0.0;
    for (const auto& [occ, amp] : amps_) acc += occ[k] * std::norm(amp);
    return acc;
}

Complex inner_product(const FockState& a, const FockState& b) {
    if (a.registry() != b.registry())
        throw std::invalid_argument("inner_product: registry mismatch");
    Complex acc{0.0, 0.0};
    const auto& small = a.amplitudes().size() < b.amplitudes().size() ? a : b;
    const auto& other = (&small == &a) ? b : a;
    for (const auto& [occ, amp] : small.amplitudes()) {
        const Complex o = other.amplitude(occ);
        if (&small == &a)
            acc += std::conj(amp) * o;
        else
            acc += std::conj(o) * amp;
    }
    return acc;
}

FockState tensor_product(const FockState& a, const FockState& b) {
    for (const auto& m : b.registry_)
        if (a.has_mode(m))
            throw std::invalid_argument("tensor_product: mode label collision on '" + m.str() + "'");
    if (a.n_max_ != b.n_max_)
        throw std::invalid_argument("tensor_product: truncation mismatch");

    std::vector<ModeLabel> registry = a.registry_;
    registry.insert(registry.end(), b.registry_.begin(), b.registry_.end());

    FockState out(std::move(registry), Truncation(a.n_max_),
                  std::min(a.amp_prune_, b.amp_prune_));
    out.amps_.clear();
    for (const auto& [occ_a, amp_a] : a.amps_) {
        for (const auto& [occ_b, amp_b] : b.amps_) {
            Occupation occ = occ_a;
            occ.insert(occ.end(), occ_b.begin(), occ_b.end());
            out.amps_[std::move(occ)] = amp_a * amp_b;
        }
    }
    out.leaked_mass_ = a.leaked_mass_ + b.leaked_mass_;
    out.pruned_mass_ = a.pruned_mass_ + b.pruned_mass_;
    out.drop_small_amplitudes();
    return out;
}

FockState apply_mode_unitary(const FockState& s, const std::vector<ModeLabel>& modes,
                             const Eigen::MatrixXcd& u, const std::vector<ModeLabel>* renamed,
                             double leak_tolerance) {
    const int k = static_cast<int>(modes.size());
    if (k == 0) throw std::invalid_argument("apply_mode_unitary: no modes given");
    if (u.rows() != k || u.cols() != k)
        throw std::invalid_argument("apply_mode_unitary: matrix size does not match mode count");
    if ((u.adjoint() * u - Eigen::MatrixXcd::Identity(k, k)).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("apply_mode_unitary: matrix is not unitary");
    if (renamed && static_cast<int>(renamed->size()) != k)
        throw std::invalid_argument("apply_mode_unitary: rename list size mismatch");

    std::vector<std::size_t> idx(k);
    for (int j = 0; j < k; ++j) idx[j] = s.mode_index(modes[j]);
    {
        std::set<std::size_t> uniq(idx.begin(), idx.end());
        if (static_cast<int>(uniq.size()) != k)
            throw std::invalid_argument("apply_mode_unitary: repeated mode");
    }

    FockState out = s;
    if (renamed) {
        for (int j = 0; j < k; ++j) out.registry_[idx[j]] = (*renamed)[j];
        check_registry(out.registry_);
    }
    out.amps_.clear();

    // Occupations on the touched modes can transiently exceed n_max while the
    // polynomial is accumulated; overflow kets are removed at the end.
    using LocalMap = std::map<Occupation, Complex>;
    for (const auto& [occ, amp] : s.amps_) {
        LocalMap poly;
        poly[Occupation(k, 0)] = 1.0;
        double in_norm_fact = 1.0;
        for (int j = 0; j < k; ++j) {
            const int nj = occ[idx[j]];
            in_norm_fact *= factorial(nj);
            for (int step = 0; step < nj; ++step) {
                LocalMap next;
                for (const auto& [locc, c] : poly) {
                    for (int i = 0; i < k; ++i) {
                        const Complex uij = u(i, j);
                        if (uij == Complex{0.0, 0.0}) continue;
                        Occupation nocc = locc;
                        ++nocc[static_cast<std::size_t>(i)];
                        next[std::move(nocc)] += c * uij;
                    }
                }
                poly = std::move(next);
            }
        }
        const double inv_sqrt_in = 1.0 / std::sqrt(in_norm_fact);
        for (const auto& [locc, c] : poly) {
            double out_fact = 1.0;
            for (int i = 0; i < k; ++i) out_fact *= factorial(locc[static_cast<std::size_t>(i)]);
            Occupation full = occ;
            for (int i = 0; i < k; ++i) full[idx[static_cast<std::size_t>(i)]] = locc[static_cast<std::size_t>(i)];
            out.amps_[std::move(full)] += amp * c * std::sqrt(out_fact) * inv_sqrt_in;
        }
    }

    // Remove kets that overflow the truncation, accounting the lost mass.
    double leaked = 0.0;
    for (auto it = out.amps_.begin(); it != out.amps_.end();) {
        bool over = false;
        for (auto n : it->first)
            if (n > out.n_max_) { over = true; break; }
        if (over) {
            leaked += std::norm(it->second);
            it = out.amps_.erase(it);
        } else {
            ++it;
        }
    }
    if (leaked > leak_tolerance) {
        std::ostringstream msg;
        msg << "apply_mode_unitary: truncation overflow leaked " << leaked
            << " probability mass (tolerance " << leak_tolerance << "); raise n_max";
        throw sim_error(msg.str());
    }
    out.leaked_mass_ += leaked;
    out.drop_small_amplitudes();
    return out;
}

FockState apply_beamsplitter(const FockState& s, const ModeLabel& m1, const ModeLabel& m2,
                             double transmissivity, double phase, double leak_tolerance) {
    if (transmissivity < 0.0 || transmissivity > 1.0)
        throw std::invalid_argument("apply_beamsplitter: transmissivity out of [0,1]");
    const double st = std::sqrt(transmissivity);
    const double sr = std::sqrt(1.0 - transmissivity);
    const Complex eip = std::polar(1.0, phase);
    Eigen::Matrix2cd u;
    u << st, sr * eip, -sr * std::conj(eip), st;
    return apply_mode_unitary(s, {m1, m2}, u, nullptr, leak_tolerance);
}

Eigen::Matrix4cd pbs_rotated_matrix() {
    Eigen::Matrix4cd m;
    // rows: D+, D-, D~+, D~-; columns: in1_h, in1_v, in2_h, in2_v
    m << 1, -1, 1, 1,
        -1, 1, 1, 1,
         1, 1, 1, -1,
         1, 1, -1, 1;
    return 0.5 * m;
}

FockState apply_pbs_rotated(const FockState& s, const std::string& in1_base,
                            const std::string& in2_base, double leak_tolerance) {
    const std::vector<ModeLabel> in = {mode_h(in1_base), mode_v(in1_base),
                                       mode_h(in2_base), mode_v(in2_base)};
    for (const auto& m : in)
        if (!s.has_mode(m))
            throw std::invalid_argument("apply_pbs_rotated: missing polarization mode '" +
                                        m.str() + "'");
    const std::vector<ModeLabel> out = {ModeLabel(kPbsOutPlus), ModeLabel(kPbsOutMinus),
                                        ModeLabel(kPbsOutTildePlus), ModeLabel(kPbsOutTildeMinus)};
    return apply_mode_unitary(s, in, pbs_rotated_matrix(), &out, leak_tolerance);
}

} // namespace qlink
