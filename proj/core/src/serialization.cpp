#include "oscdelta/serialization.hpp"

#include "oscdelta/errors.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace oscdelta {

using nlohmann::json;

namespace {

json number_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double json_number(const json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json complex_json(cplx z) { return {{"re", number_json(z.real())}, {"im", number_json(z.imag())}}; }

cplx json_complex(const json& j) { return {json_number(j.at("re")), json_number(j.at("im"))}; }

json params_json(const BarrierParams::Values& v) {
    return {{"V0", v.V0}, {"eps", v.eps}, {"Omega", v.Omega}, {"E", v.E}, {"hbar", v.hbar}, {"mass", v.mass}};
}

BarrierParams::Values json_params(const json& j) {
    BarrierParams::Values v;
    v.V0 = j.at("V0").get<double>();
    v.eps = j.at("eps").get<double>();
    v.Omega = j.at("Omega").get<double>();
    v.E = j.at("E").get<double>();
    v.hbar = j.at("hbar").get<double>();
    v.mass = j.at("mass").get<double>();
    return v;
}

json regime_json(const RegimeInfo& r) {
    return {{"regime", to_string(r.regime)}, {"boundary", r.boundary}};
}

Regime parse_regime(const std::string& s) {
    if (s == to_string(Regime::A)) return Regime::A;
    if (s == to_string(Regime::B)) return Regime::B;
    if (s == to_string(Regime::C)) return Regime::C;
    throw InvalidParameter("unknown regime label '" + s + "'");
}

json sideband_object(const SidebandSolution& sol) {
    json channels = json::array();
    for (int n = sol.n_min; n <= sol.n_max; ++n) {
        const Channel& ch = sol.channels[static_cast<std::size_t>(n - sol.n_min)];
        channels.push_back({{"n", n},
                            {"kind", to_string(ch.kind)},
                            {"omega", number_json(ch.omega)},
                            {"k", complex_json(ch.k)},
                            {"r", complex_json(sol.r_at(n))},
                            {"t", complex_json(sol.t_at(n))},
                            {"intensity", number_json(sol.intensity(n))}});
    }
    return {{"params", params_json(sol.params)},
            {"n_min", sol.n_min},
            {"n_max", sol.n_max},
            {"residual", number_json(sol.residual)},
            {"reflected_flux", number_json(sol.reflected_flux)},
            {"transmitted_flux", number_json(sol.transmitted_flux)},
            {"flux_sum", number_json(sol.flux_sum())},
            {"channels", channels}};
}

json parse_json(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidParameter(std::string("malformed JSON: ") + e.what());
    }
}

void check_cell_text(const std::string& s) {
    if (s.find_first_of(",\n\r\"") != std::string::npos) {
        throw InvalidParameter("CSV cell '" + s + "' contains a separator");
    }
}

} // namespace

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

double parse_number(std::string_view text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (!text.empty() && *first == '+') ++first;
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last || text.empty()) {
        throw InvalidParameter("'" + std::string(text) + "' is not a number");
    }
    return value;
}

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw InvalidParameter("Table: row width does not match the header");
    rows.push_back(std::move(row));
}

std::size_t Table::column_index(std::string_view column) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == column) return i;
    }
    throw InvalidParameter("Table: no column '" + std::string(column) + "'");
}

double Table::number(std::size_t row, std::string_view column) const {
    const Cell& c = rows.at(row).at(column_index(column));
    if (const double* d = std::get_if<double>(&c)) return *d;
    throw InvalidParameter("Table: column '" + std::string(column) + "' is not numeric");
}

const std::string& Table::text(std::size_t row, std::string_view column) const {
    const Cell& c = rows.at(row).at(column_index(column));
    if (const std::string* s = std::get_if<std::string>(&c)) return *s;
    throw InvalidParameter("Table: column '" + std::string(column) + "' is not text");
}

std::string to_csv(const Table& table) {
    std::string out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        check_cell_text(table.columns[i]);
        if (i) out += ',';
        out += table.columns[i];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            if (const double* d = std::get_if<double>(&row[i])) {
                out += format_number(*d);
            } else {
                const auto& s = std::get<std::string>(row[i]);
                check_cell_text(s);
                out += s;
            }
        }
        out += '\n';
    }
    return out;
}

Table parse_csv(std::string_view text) {
    Table table;
    bool header = true;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;

        std::vector<std::string_view> fields;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            fields.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (header) {
            for (auto f : fields) table.columns.emplace_back(f);
            header = false;
            continue;
        }
        std::vector<Cell> row;
        row.reserve(fields.size());
        for (auto f : fields) {
            try {
                row.emplace_back(parse_number(f));
            } catch (const InvalidParameter&) {
                row.emplace_back(std::string(f));
            }
        }
        table.add_row(std::move(row));
    }
    return table;
}

std::string to_json(const Table& table) {
    json rows = json::array();
    for (const auto& row : table.rows) {
        json r = json::array();
        for (const auto& c : row) {
            if (const double* d = std::get_if<double>(&c)) {
                r.push_back(number_json(*d));
            } else {
                r.push_back(std::get<std::string>(c));
            }
        }
        rows.push_back(std::move(r));
    }
    return json{{"columns", table.columns}, {"rows", rows}}.dump(2) + "\n";
}

Table sideband_table(const SidebandSolution& sol) {
    Table t;
    t.columns = {"n", "re_r", "im_r", "I_n", "kind"};
    for (int n = sol.n_min; n <= sol.n_max; ++n) {
        const cplx r = sol.r_at(n);
        t.add_row({static_cast<double>(n), r.real(), r.imag(), sol.intensity(n),
                   std::string(to_string(sol.channels[static_cast<std::size_t>(n - sol.n_min)].kind))});
    }
    return t;
}

std::string sideband_json(const SidebandSolution& sol, std::string_view solver) {
    json j = sideband_object(sol);
    j["solver"] = std::string(solver);
    return j.dump(2) + "\n";
}

SidebandSolution parse_sideband_json(std::string_view text) {
    const json j = parse_json(text);
    try {
        const BarrierParams params(json_params(j.at("params")));
        const int n_min = j.at("n_min").get<int>();
        const int n_max = j.at("n_max").get<int>();
        const auto& channels = j.at("channels");
        if (static_cast<int>(channels.size()) != n_max - n_min + 1) {
            throw InvalidParameter("sideband JSON: channel count does not match [n_min, n_max]");
        }
        std::vector<cplx> r;
        r.reserve(channels.size());
        for (const auto& ch : channels) r.push_back(json_complex(ch.at("r")));
        SidebandSolution sol = make_sideband_solution(params, n_min, std::move(r), json_number(j.at("residual")));
        // t comes from continuity; keep the stored values in case they were edited.
        for (std::size_t i = 0; i < channels.size(); ++i) sol.t[i] = json_complex(channels[i].at("t"));
        return sol;
    } catch (const json::exception& e) {
        throw InvalidParameter(std::string("sideband JSON: ") + e.what());
    }
}

std::string toeplitz_json(const ToeplitzSolution& sol) {
    json j = sideband_object(sol.sidebands);
    j["solver"] = "ts";
    j["theta_plus"] = complex_json(sol.exponents.theta_plus);
    j["theta_minus"] = complex_json(sol.exponents.theta_minus);
    j["decay_plus"] = complex_json(sol.exponents.plus.decaying);
    j["decay_minus"] = complex_json(sol.exponents.minus.decaying);
    j["regime"] = regime_json(sol.exponents.regime);
    j["determinant"] = complex_json(sol.determinant);
    return j.dump(2) + "\n";
}

Table sweep_table(const SweepResult& sweep) {
    Table t;
    t.columns = {"omega", "I_m1", "I_0", "I_p1", "F", "regime"};
    for (const auto& p : sweep.points) {
        t.add_row({p.omega, p.i_minus, p.i_zero, p.i_plus,
                   p.F ? *p.F : std::numeric_limits<double>::quiet_NaN(), std::string(to_string(p.regime.regime))});
    }
    return t;
}

std::string sweep_json(const SweepResult& sweep) {
    json points = json::array();
    for (const auto& p : sweep.points) {
        points.push_back({{"omega", p.omega},
                          {"I_m1", number_json(p.i_minus)},
                          {"I_0", number_json(p.i_zero)},
                          {"I_p1", number_json(p.i_plus)},
                          {"F", p.F ? number_json(*p.F) : json(nullptr)},
                          {"regime", to_string(p.regime.regime)},
                          {"boundary", p.regime.boundary},
                          {"in_fit", p.in_fit}});
    }
    json fit = nullptr;
    if (sweep.fit) {
        fit = {{"slope", number_json(sweep.fit->slope)},
               {"intercept", number_json(sweep.fit->intercept)},
               {"r_squared", number_json(sweep.fit->r_squared)},
               {"residual_rms", number_json(sweep.fit->residual_rms)},
               {"points", sweep.fit->points}};
    }
    const BarrierParams params(sweep.params);
    json j{{"solver", to_string(sweep.solver)},
           {"params", params_json(sweep.params)},
           {"tau_delta", tau_delta(params)},
           {"points", points},
           {"fit", fit}};
    return j.dump(2) + "\n";
}

SweepResult parse_sweep_json(std::string_view text) {
    const json j = parse_json(text);
    try {
        SweepResult s;
        s.params = json_params(j.at("params"));
        const std::string solver = j.at("solver").get<std::string>();
        if (solver == "fs") {
            s.solver = SolverKind::FS;
        } else if (solver == "ts") {
            s.solver = SolverKind::TS;
        } else {
            throw InvalidParameter("sweep JSON: unknown solver '" + solver + "'");
        }
        for (const auto& p : j.at("points")) {
            SweepPoint pt;
            pt.omega = p.at("omega").get<double>();
            pt.i_minus = json_number(p.at("I_m1"));
            pt.i_zero = json_number(p.at("I_0"));
            pt.i_plus = json_number(p.at("I_p1"));
            if (!p.at("F").is_null()) pt.F = p.at("F").get<double>();
            pt.regime.regime = parse_regime(p.at("regime").get<std::string>());
            pt.regime.boundary = p.at("boundary").get<bool>();
            pt.in_fit = p.at("in_fit").get<bool>();
            s.points.push_back(pt);
        }
        if (!j.at("fit").is_null()) {
            const auto& f = j.at("fit");
            LinearFit fit;
            fit.slope = json_number(f.at("slope"));
            fit.intercept = json_number(f.at("intercept"));
            fit.r_squared = json_number(f.at("r_squared"));
            fit.residual_rms = json_number(f.at("residual_rms"));
            fit.points = f.at("points").get<int>();
            s.fit = fit;
        }
        return s;
    } catch (const json::exception& e) {
        throw InvalidParameter(std::string("sweep JSON: ") + e.what());
    }
}

Table regime_c_table(const RegimeCTable& table) {
    Table t;
    t.columns = {"omega", "F_amplitude", "F_flux", "reference"};
    for (const auto& r : table.rows) {
        t.add_row({r.omega, r.F_amplitude, r.F_flux,
                   r.reference ? *r.reference : std::numeric_limits<double>::quiet_NaN()});
    }
    return t;
}

std::string regime_c_json(const RegimeCTable& table) {
    json rows = json::array();
    for (const auto& r : table.rows) {
        rows.push_back({{"omega", r.omega},
                        {"F_amplitude", number_json(r.F_amplitude)},
                        {"F_flux", number_json(r.F_flux)},
                        {"reference", r.reference ? number_json(*r.reference) : json(nullptr)}});
    }
    json j{{"tau_delta", table.tau_delta}, {"T0", table.T0}, {"rows", rows}, {"warnings", table.warnings}};
    return j.dump(2) + "\n";
}

Table tdse_table(const TdseRun& run) {
    Table t;
    t.columns = {"t", "norm", "p_right"};
    for (const auto& s : run.history) t.add_row({s.t, s.norm, s.p_right});
    return t;
}

std::string tdse_json(const TdseRun& run) {
    json history = json::array();
    for (const auto& s : run.history) history.push_back({s.t, s.norm, s.p_right});
    json j{{"params", params_json(run.params)},
           {"well", {{"width", run.well.width}, {"n_levels", run.well.n_levels}}},
           {"packet",
            {{"x0", run.packet.x0},
             {"sigma", run.packet.sigma},
             {"k_mean", run.packet.k_mean},
             {"mean_energy", packet_mean_energy(run.packet, run.params.hbar, run.params.mass)}}},
           {"captured_norm", run.captured_norm},
           {"max_norm_drift", run.max_norm_drift},
           {"integrator",
            {{"steps", run.stats.steps},
             {"rejected", run.stats.rejected},
             {"rhs_evaluations", run.stats.rhs_evaluations}}},
           {"plateau",
            {{"found", run.plateau.found}, {"time", run.plateau.time}, {"value", run.plateau.value}}},
           {"history_columns", {"t", "norm", "p_right"}},
           {"history", history}};
    return j.dump(2) + "\n";
}

} // namespace oscdelta
