#include "nadid/panel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "nadid/detail/text.hpp"

namespace nadid {

PanelDataset PanelDataset::build(std::vector<PanelRow> rows, std::optional<int> declared_start) {
    if (rows.empty()) {
        throw ValidationError("panel has no rows");
    }
    std::unordered_map<std::string, int> unit_treated;
    int max_period = 0;
    int min_post_period = std::numeric_limits<int>::max();
    for (const auto& row : rows) {
        if (row.period < 1) {
            throw ValidationError("unit '" + row.unit + "': period " +
                                  std::to_string(row.period) + " is below 1");
        }
        if (row.treated != 0 && row.treated != 1) {
            throw ValidationError("unit '" + row.unit + "': Treated must be 0 or 1");
        }
        if (row.post != 0 && row.post != 1) {
            throw ValidationError("unit '" + row.unit + "': PostTreatment must be 0 or 1");
        }
        if (!std::isfinite(row.outcome)) {
            throw ValidationError("unit '" + row.unit + "', period " +
                                  std::to_string(row.period) + ": non-finite outcome");
        }
        auto [it, inserted] = unit_treated.emplace(row.unit, row.treated);
        if (!inserted && it->second != row.treated) {
            throw ValidationError("unit '" + row.unit +
                                  "' changes treated status across rows; Treated must be "
                                  "constant within unit");
        }
        max_period = std::max(max_period, row.period);
        if (row.post == 1) min_post_period = std::min(min_post_period, row.period);
    }

    const bool has_post = min_post_period != std::numeric_limits<int>::max();
    int start = 0;
    if (declared_start.has_value()) {
        start = *declared_start;
    } else {
        start = has_post ? min_post_period : max_period + 1;
    }
    for (const auto& row : rows) {
        const int expected = row.period >= start ? 1 : 0;
        if (row.post != expected) {
            throw ValidationError(
                "unit '" + row.unit + "', period " + std::to_string(row.period) +
                ": PostTreatment=" + std::to_string(row.post) +
                " contradicts treatment start " + std::to_string(start) +
                " (post must equal 1 exactly when period >= treatment start)");
        }
    }

    PanelDataset panel;
    panel.rows_ = std::move(rows);
    panel.treatment_start_ = start;
    panel.n_units_ = static_cast<int>(unit_treated.size());
    panel.n_periods_ = max_period;
    panel.has_post_ = has_post;
    return panel;
}

PanelDataset PanelDataset::from_rows(std::vector<PanelRow> rows) {
    return build(std::move(rows), std::nullopt);
}

PanelDataset PanelDataset::from_rows(std::vector<PanelRow> rows, int treatment_start) {
    return build(std::move(rows), treatment_start);
}

std::vector<int> PanelDataset::post_periods() const {
    std::set<int> periods;
    for (const auto& row : rows_) {
        if (row.post == 1) periods.insert(row.period);
    }
    return std::vector<int>(periods.begin(), periods.end());
}

PanelDataset read_panel_csv(std::istream& in, const ColumnMap& columns) {
    std::string header;
    if (!std::getline(in, header)) {
        throw ValidationError("panel CSV is empty");
    }
    const auto names = detail::split_csv_line(header);
    auto find_col = [&](const std::string& wanted) -> std::size_t {
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i] == wanted) return i;
        }
        throw ValidationError("panel CSV is missing column '" + wanted + "'");
    };
    const std::size_t c_unit = find_col(columns.unit);
    const std::size_t c_period = find_col(columns.period);
    const std::size_t c_treated = find_col(columns.treated);
    const std::size_t c_post = find_col(columns.post);
    const std::size_t c_outcome = find_col(columns.outcome);

    std::vector<PanelRow> rows;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != names.size()) {
            throw ValidationError("line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(names.size()) + " fields, found " +
                                  std::to_string(fields.size()));
        }
        PanelRow row;
        row.unit = fields[c_unit];
        row.period = detail::parse_int(fields[c_period], columns.period, line_no);
        row.treated = detail::parse_int(fields[c_treated], columns.treated, line_no);
        row.post = detail::parse_int(fields[c_post], columns.post, line_no);
        row.outcome = detail::parse_double(fields[c_outcome], columns.outcome, line_no);
        rows.push_back(std::move(row));
    }
    return PanelDataset::from_rows(std::move(rows));
}

PanelDataset read_panel_csv_file(const std::string& path, const ColumnMap& columns) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open panel CSV '" + path + "' for reading");
    }
    try {
        return read_panel_csv(in, columns);
    } catch (const ValidationError& err) {
        throw ValidationError(path + ": " + err.what());
    }
}

void write_panel_csv(std::ostream& out, const PanelDataset& panel) {
    out << "Hospital,Period,Treated,PostTreatment,InfectionRate\n";
    for (const auto& row : panel.rows()) {
        out << row.unit << ',' << row.period << ',' << row.treated << ',' << row.post << ','
            << detail::fmt_double(row.outcome) << '\n';
    }
}

void write_panel_csv_file(const std::string& path, const PanelDataset& panel) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    write_panel_csv(out, panel);
    if (!out.good()) {
        throw IoError("write to '" + path + "' failed");
    }
}

}  // namespace nadid
