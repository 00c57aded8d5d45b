#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nadid/error.hpp"

namespace nadid {

struct PanelRow {
    std::string unit;
    int period = 0;   // >= 1
    int treated = 0;  // {0,1}, constant per unit
    int post = 0;     // {0,1}, post == (period >= treatment_start)
    double outcome = 0.0;
};

/// Column names used when reading a panel CSV. Defaults match the canonical
/// schema `Hospital,Period,Treated,PostTreatment,InfectionRate`.
struct ColumnMap {
    std::string unit = "Hospital";
    std::string period = "Period";
    std::string treated = "Treated";
    std::string post = "PostTreatment";
    std::string outcome = "InfectionRate";
};

/// Long-format panel. Construction validates the invariants: treated is
/// constant within unit, and post = 1 exactly for period >= treatment_start
/// (treatment_start inferred as the smallest post period when not supplied).
class PanelDataset {
public:
    static PanelDataset from_rows(std::vector<PanelRow> rows);
    static PanelDataset from_rows(std::vector<PanelRow> rows, int treatment_start);

    const std::vector<PanelRow>& rows() const { return rows_; }
    /// One past the last observed period when the panel has no post rows.
    int treatment_start() const { return treatment_start_; }
    int n_units() const { return n_units_; }
    int n_periods() const { return n_periods_; }
    bool has_post_rows() const { return has_post_; }

    /// Distinct post periods, ascending.
    std::vector<int> post_periods() const;

private:
    PanelDataset() = default;
    static PanelDataset build(std::vector<PanelRow> rows, std::optional<int> declared_start);
    std::vector<PanelRow> rows_;
    int treatment_start_ = 0;
    int n_units_ = 0;
    int n_periods_ = 0;
    bool has_post_ = false;
};

PanelDataset read_panel_csv(std::istream& in, const ColumnMap& columns = {});
PanelDataset read_panel_csv_file(const std::string& path, const ColumnMap& columns = {});
void write_panel_csv(std::ostream& out, const PanelDataset& panel);
void write_panel_csv_file(const std::string& path, const PanelDataset& panel);

}  // namespace nadid
