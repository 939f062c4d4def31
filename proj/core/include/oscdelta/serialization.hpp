// serialization.hpp: CSV and JSON writers (and readers for round trips)
//
// Numbers are written with 17 significant digits so every finite double
// survives a write/read cycle bit for bit. Complex amplitudes appear as
// separate re/im fields.

#pragma once

#include "oscdelta/full_solution.hpp"
#include "oscdelta/tdse.hpp"
#include "oscdelta/timescales.hpp"
#include "oscdelta/toeplitz.hpp"

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace oscdelta {

std::string format_number(double value);
// Throws InvalidParameter unless the whole string is a number.
double parse_number(std::string_view text);

using Cell = std::variant<double, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row);   // checks the width
    double number(std::size_t row, std::string_view column) const;
    const std::string& text(std::size_t row, std::string_view column) const;
    std::size_t column_index(std::string_view column) const;
};

// Header line then one line per row, '\n' terminated.
std::string to_csv(const Table& table);
// Cells that parse completely as numbers come back as doubles.
Table parse_csv(std::string_view text);

// {"columns": [...], "rows": [[...], ...]}; non-finite numbers become null.
std::string to_json(const Table& table);

// n, re_r, im_r, I_n, kind
Table sideband_table(const SidebandSolution& sol);

std::string sideband_json(const SidebandSolution& sol, std::string_view solver);
SidebandSolution parse_sideband_json(std::string_view text);

// Sideband JSON plus the decay exponents and closure determinant.
std::string toeplitz_json(const ToeplitzSolution& sol);

// omega, I_m1, I_0, I_p1, F, regime (F is nan when undefined)
Table sweep_table(const SweepResult& sweep);
std::string sweep_json(const SweepResult& sweep);
SweepResult parse_sweep_json(std::string_view text);

// omega, F_amplitude, F_flux, reference (nan where undefined)
Table regime_c_table(const RegimeCTable& table);
std::string regime_c_json(const RegimeCTable& table);

// t, norm, p_right
Table tdse_table(const TdseRun& run);
std::string tdse_json(const TdseRun& run);

} // namespace oscdelta
