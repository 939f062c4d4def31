#include "oscdelta/tdse.hpp"

#include "oscdelta/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace oscdelta {

namespace {

constexpr double kPi = std::numbers::pi;

double momentum_spread(const PacketSpec& packet) { return 1.0 / (2.0 * packet.sigma); }

double group_velocity(const PacketSpec& packet, double hbar, double mass) {
    return hbar * packet.k_mean / mass;
}

// ∫ e^{i s x} ψ0(x) dx over the real line.
cplx packet_transform(const PacketSpec& packet, double s) {
    const double kappa = s + packet.k_mean;
    const double sigma2 = packet.sigma * packet.sigma;
    const double prefactor = std::pow(2.0 * kPi * sigma2, -0.25) * std::sqrt(4.0 * kPi * sigma2);
    return prefactor * std::exp(cplx(-sigma2 * kappa * kappa, kappa * packet.x0));
}

// ∫ sin(k x + phase) ψ0(x) dx
cplx sine_overlap(const PacketSpec& packet, double k, double phase) {
    const cplx up = std::polar(1.0, phase) * packet_transform(packet, k);
    const cplx down = std::polar(1.0, -phase) * packet_transform(packet, -k);
    return (up - down) / cplx(0.0, 2.0);
}

} // namespace

PacketSpec default_packet(const WellSpec& well, double k_mean) {
    PacketSpec p;
    p.x0 = -0.25 * well.width;
    p.sigma = well.width / 32.0;
    p.k_mean = k_mean;
    return p;
}

double packet_mean_energy(const PacketSpec& packet, double hbar, double mass) {
    const double sk = momentum_spread(packet);
    return hbar * hbar * (packet.k_mean * packet.k_mean + sk * sk) / (2.0 * mass);
}

void validate_packet(const PacketSpec& packet, const WellSpec& well) {
    if (!(well.width > 0.0)) throw InvalidParameter("WellSpec: width must be > 0");
    if (!(packet.sigma > 0.0)) throw InvalidParameter("PacketSpec: sigma must be > 0");
    if (!(packet.k_mean > 0.0)) throw InvalidParameter("PacketSpec: k_mean must be > 0 (rightward)");
    if (!(packet.tail_threshold > 0.0 && packet.tail_threshold < 1.0)) {
        throw InvalidParameter("PacketSpec: tail_threshold must lie in (0, 1)");
    }
    const double half = 0.5 * well.width;
    if (!(packet.x0 > -half && packet.x0 < 0.0)) {
        throw InvalidParameter("PacketSpec: x0 must lie inside the left half (-L/2, 0)");
    }
    const auto envelope = [&](double x) {
        const double d = x - packet.x0;
        return std::exp(-d * d / (4.0 * packet.sigma * packet.sigma));
    };
    const double at_barrier = envelope(0.0);
    const double at_wall = envelope(-half);
    if (at_barrier > packet.tail_threshold || at_wall > packet.tail_threshold) {
        std::ostringstream os;
        os << "PacketSpec: packet tail exceeds " << packet.tail_threshold << " of its peak (at x = 0: "
           << at_barrier << ", at x = -L/2: " << at_wall << "); reduce sigma or widen the well";
        throw InvalidParameter(os.str());
    }
}

int default_level_count(const WellSpec& well, const PacketSpec& packet, const BarrierParams& params,
                        int bands) {
    const double e_mean = packet_mean_energy(packet, params.hbar(), params.mass());
    const double e_cut = e_mean + bands * params.photon_energy();
    const double k_band = std::sqrt(2.0 * params.mass() * e_cut) / params.hbar();
    const double k_packet = packet.k_mean + 8.0 * momentum_spread(packet);
    const double k_cut = std::max(k_band, k_packet);
    const double count = std::floor(k_cut * well.width / kPi);
    return std::max(2, static_cast<int>(std::ceil(1.25 * count)));
}

std::vector<cplx> project_packet(const InstantBasis& basis, const PacketSpec& packet) {
    std::vector<cplx> out(static_cast<std::size_t>(basis.size()));
    const double half = 0.5 * basis.width;
    // On x < 0 the even states read A sin(k x + kL/2).
    for (int i = 0; i < basis.even_count(); ++i) {
        const EvenLevel& lv = basis.even[static_cast<std::size_t>(i)];
        out[static_cast<std::size_t>(i)] = lv.norm * sine_overlap(packet, lv.k, lv.k * half);
    }
    const double odd_norm = std::sqrt(2.0 / basis.width);
    for (int j = 0; j < basis.odd_count(); ++j) {
        out[static_cast<std::size_t>(basis.even_count() + j)] =
            odd_norm * sine_overlap(packet, basis.odd_k[static_cast<std::size_t>(j)], 0.0);
    }
    return out;
}

std::vector<cplx> TdseRun::amplitudes() const {
    const auto ne = static_cast<std::size_t>(c_even.size());
    const auto no = static_cast<std::size_t>(c_odd.size());
    std::vector<cplx> a(ne + no);
    for (std::size_t i = 0; i < ne; ++i) {
        a[i] = c_even(static_cast<Eigen::Index>(i)) * std::polar(1.0, -phase_even(static_cast<Eigen::Index>(i)));
    }
    for (std::size_t j = 0; j < no; ++j) {
        a[ne + j] = c_odd(static_cast<Eigen::Index>(j)) * std::polar(1.0, -odd_energy[j] * t / params.hbar);
    }
    return a;
}

AdiabaticSystem::AdiabaticSystem(const BarrierParams& params, double width, int n_even)
    : params_(params), width_(width), n_even_(n_even) {}

void AdiabaticSystem::operator()(double t, const Eigen::VectorXd& y, Eigen::VectorXd& dydt) const {
    const int n = n_even_;
    const double B = params_.coupling() * (1.0 + params_.eps() * std::cos(params_.Omega() * t));
    const std::vector<EvenLevel> levels = even_spectrum(B, width_, n, params_.hbar(), params_.mass());
    const double dV_dt = -params_.V0() * params_.eps() * params_.Omega() * std::sin(params_.Omega() * t);

    dydt.resize(3 * n);
    for (int i = 0; i < n; ++i) dydt(2 * n + i) = levels[static_cast<std::size_t>(i)].energy / params_.hbar();

    if (dV_dt == 0.0) {
        dydt.head(2 * n).setZero();
        return;
    }

    // b_j = φ_j(0) c_j e^{-iΦ_j}
    std::vector<cplx> b(static_cast<std::size_t>(n));
    std::vector<cplx> rotor(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        rotor[ju] = std::polar(1.0, y(2 * n + j));
        b[ju] = levels[ju].at_origin * cplx(y(j), y(n + j)) / rotor[ju];
    }
    for (int i = 0; i < n; ++i) {
        const auto iu = static_cast<std::size_t>(i);
        const double Ei = levels[iu].energy;
        cplx sum{};
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            sum += b[static_cast<std::size_t>(j)] / (levels[static_cast<std::size_t>(j)].energy - Ei);
        }
        const cplx dc = -dV_dt * levels[iu].at_origin * rotor[iu] * sum;
        dydt(i) = dc.real();
        dydt(n + i) = dc.imag();
    }
}

Plateau find_plateau(const std::vector<TdseSample>& history, int window, double tol) {
    Plateau out;
    if (window < 1 || history.size() < static_cast<std::size_t>(window) + 1) return out;
    double p_max = 0.0;
    for (const auto& s : history) p_max = std::max(p_max, s.p_right);

    std::size_t start = 0;
    while (start < history.size() && history[start].p_right < 0.5 * p_max) ++start;

    const auto w = static_cast<std::size_t>(window);
    for (std::size_t i = start; i + w < history.size(); ++i) {
        double lo = history[i].p_right;
        double hi = lo;
        double sum = 0.0;
        for (std::size_t j = i; j <= i + w; ++j) {
            lo = std::min(lo, history[j].p_right);
            hi = std::max(hi, history[j].p_right);
            sum += history[j].p_right;
        }
        if (hi - lo <= tol) {
            out.found = true;
            out.time = history[i].t;
            out.value = sum / static_cast<double>(w + 1);
            return out;
        }
    }
    return out;
}

TdseRun propagate(const WellSpec& well_in, const PacketSpec& packet, const BarrierParams& params,
                  const TdseOptions& options) {
    if (!(options.tol > 0.0)) throw InvalidParameter("propagate: tol must be > 0");
    if (!(options.local_tol_factor > 0.0 && options.local_tol_factor <= 1.0)) {
        throw InvalidParameter("propagate: local_tol_factor must lie in (0, 1]");
    }
    if (options.samples < 2) throw InvalidParameter("propagate: need at least 2 samples");
    validate_packet(packet, well_in);

    WellSpec well = well_in;
    if (well.n_levels <= 0) well.n_levels = default_level_count(well, packet, params, options.bands);

    // The highest retained level must reach at least the first sideband band.
    const double e_mean = packet_mean_energy(packet, params.hbar(), params.mass());
    const double k_top = well.n_levels * kPi / well.width;
    const double e_top = params.hbar() * params.hbar() * k_top * k_top / (2.0 * params.mass());
    if (e_top < e_mean + params.photon_energy()) {
        std::ostringstream os;
        os << "propagate: " << well.n_levels << " levels reach E = " << e_top << ", below <E> + hbar*Omega = "
           << e_mean + params.photon_energy();
        throw InvalidParameter(os.str());
    }

    const InstantBasis basis0 = instant_basis(params, well, 0.0);
    std::vector<cplx> amps = project_packet(basis0, packet);
    double captured = 0.0;
    for (const cplx& a : amps) captured += std::norm(a);
    if (captured < options.min_captured_norm) {
        std::ostringstream os;
        os << "propagate: basis of " << well.n_levels << " levels captures only " << captured
           << " of the packet norm";
        throw InvalidParameter(os.str());
    }
    const double renorm = 1.0 / std::sqrt(captured);
    for (cplx& a : amps) a *= renorm;

    TdseRun run;
    run.params = params.values();
    run.well = well;
    run.packet = packet;
    run.captured_norm = captured;

    const int ne = basis0.even_count();
    const int no = basis0.odd_count();
    run.c_even.resize(ne);
    run.phase_even = Eigen::VectorXd::Zero(ne);
    run.c_odd.resize(no);
    run.odd_energy = basis0.odd_energy;
    for (int i = 0; i < ne; ++i) run.c_even(i) = amps[static_cast<std::size_t>(i)];
    for (int j = 0; j < no; ++j) run.c_odd(j) = amps[static_cast<std::size_t>(ne + j)];

    run.initial_weights.reserve(amps.size());
    for (int i = 0; i < basis0.size(); ++i) {
        run.initial_weights.push_back({basis0.energy(i), std::norm(amps[static_cast<std::size_t>(i)])});
    }

    const double t_final = options.t_final > 0.0
                               ? options.t_final
                               : 0.85 * well.width / group_velocity(packet, params.hbar(), params.mass());

    const double odd_norm2 = run.c_odd.squaredNorm();
    const AdiabaticSystem system(params, well.width, ne);
    CashKarpOptions ck;
    ck.rtol = options.local_tol_factor * options.tol;
    ck.atol = ck.rtol;

    Eigen::VectorXd y(3 * ne);
    y.head(ne) = run.c_even.real();
    y.segment(ne, ne) = run.c_even.imag();
    y.tail(ne).setZero();

    auto record = [&](double t) {
        run.t = t;
        for (int i = 0; i < ne; ++i) run.c_even(i) = cplx(y(i), y(ne + i));
        run.phase_even = y.tail(ne);
        const double norm = run.c_even.squaredNorm() + odd_norm2;
        const double drift = std::abs(norm - 1.0);
        run.max_norm_drift = std::max(run.max_norm_drift, drift);
        const InstantBasis basis = t == 0.0 ? basis0 : instant_basis(params, well, t);
        const std::vector<cplx> a = run.amplitudes();
        run.history.push_back({t, norm, right_probability(basis, a)});
        if (drift > options.norm_drift_factor * options.tol) {
            std::ostringstream os;
            os << "propagate: norm drifted by " << drift << " at t = " << t << " (limit " << options.norm_drift_factor * options.tol
               << ")";
            throw NormDriftError(os.str(), t, drift);
        }
    };

    record(0.0);
    double h = 0.0;
    double t_prev = 0.0;
    for (int s = 1; s <= options.samples; ++s) {
        const double t_next = t_final * static_cast<double>(s) / options.samples;
        integrate_cash_karp(system, t_prev, t_next, y, h, ck, run.stats);
        t_prev = t_next;
        record(t_next);
    }

    const int window = options.plateau_window > 0 ? options.plateau_window : std::max(5, options.samples / 40);
    run.plateau = find_plateau(run.history, window, options.plateau_tol);
    return run;
}

double transmitted_probability(const TdseRun& run, double t) {
    const auto& h = run.history;
    if (h.empty() || t < h.front().t || t > h.back().t) {
        std::ostringstream os;
        os << "transmitted_probability: t = " << t << " outside the recorded history";
        throw InvalidParameter(os.str());
    }
    const auto it = std::lower_bound(h.begin(), h.end(), t,
                                     [](const TdseSample& s, double value) { return s.t < value; });
    if (it->t == t || it == h.begin()) return it->p_right;
    const auto prev = std::prev(it);
    const double w = (t - prev->t) / (it->t - prev->t);
    return (1.0 - w) * prev->p_right + w * it->p_right;
}

std::vector<EnergyWeight> momentum_energy_weights(const PacketSpec& packet, double hbar, double mass,
                                                  int points) {
    if (points < 3) throw InvalidParameter("momentum_energy_weights: need at least 3 points");
    const double sk = momentum_spread(packet);
    const double k_lo = std::max(packet.k_mean - 8.0 * sk, 1e-6 * packet.k_mean);
    const double k_hi = packet.k_mean + 8.0 * sk;
    const double dk = (k_hi - k_lo) / (points - 1);
    std::vector<EnergyWeight> out;
    out.reserve(static_cast<std::size_t>(points));
    double total = 0.0;
    for (int i = 0; i < points; ++i) {
        const double k = k_lo + i * dk;
        const double d = k - packet.k_mean;
        const double trapezoid = (i == 0 || i == points - 1) ? 0.5 : 1.0;
        const double w = trapezoid * std::exp(-2.0 * packet.sigma * packet.sigma * d * d);
        out.push_back({hbar * hbar * k * k / (2.0 * mass), w});
        total += w;
    }
    for (auto& e : out) e.weight /= total;
    return out;
}

std::vector<EnergyWeight> packet_energy_weights(const TdseRun& run, WeightModel model) {
    if (model == WeightModel::Projection) return run.initial_weights;
    return momentum_energy_weights(run.packet, run.params.hbar, run.params.mass);
}

CollisionSetup sideband_resolved_setup(const BarrierParams& params, double mean_energy, double resolution) {
    if (!(mean_energy > 0.0)) throw InvalidParameter("sideband_resolved_setup: mean energy must be > 0");
    if (!(resolution > 0.0)) throw InvalidParameter("sideband_resolved_setup: resolution must be > 0");
    const double hbar = params.hbar();
    const double mass = params.mass();
    const double k2_mean = 2.0 * mass * mean_energy / (hbar * hbar);

    // σ depends on k and ⟨k²⟩ = k² + 1/(4σ²) depends on σ; a few sweeps settle both.
    double k = std::sqrt(k2_mean);
    double sigma = 0.0;
    for (int it = 0; it < 4; ++it) {
        sigma = resolution * hbar * k / (2.0 * mass * params.Omega());
        k = std::sqrt(std::max(k2_mean - 1.0 / (4.0 * sigma * sigma), 0.25 * k2_mean));
    }

    CollisionSetup setup;
    setup.well.width = 48.0 * sigma;
    setup.packet.sigma = sigma;
    setup.packet.k_mean = k;
    setup.packet.x0 = -0.25 * setup.well.width;
    return setup;
}

} // namespace oscdelta
