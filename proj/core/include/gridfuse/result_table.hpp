#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace gridfuse {

struct ResultKey {
    std::string method;
    std::string quantity;
    std::string sweep_name;
    double sweep_value = 0.0;
    std::string metric;

    bool operator==(const ResultKey&) const = default;
};

/// One aggregated cell. `per_trial` is empty for tables read back from CSV.
struct ResultCell {
    ResultKey key;
    double value = 0.0;      // mean over trials
    double trial_std = 0.0;  // sample std over trials, 0 for a single trial
    std::vector<double> per_trial;
};

/// Ordered collection of result cells. Rows keep insertion order, so output
/// is byte-identical for identical inputs.
class ResultTable {
public:
    static constexpr std::string_view kCsvHeader = "method,quantity,sweep_name,sweep_value,metric,value,trial_std";

    /// Aggregates `per_trial` (non-empty, finite, >= 0). Throws InvalidArgument
    /// on a duplicate key or invalid values.
    void add(ResultKey key, std::vector<double> per_trial);
    void add_cell(ResultCell cell);
    void append(const ResultTable& other);

    const std::vector<ResultCell>& cells() const noexcept { return cells_; }
    std::size_t size() const noexcept { return cells_.size(); }
    bool empty() const noexcept { return cells_.empty(); }

    const ResultCell* find(const ResultKey& key) const;
    /// Throws InvalidArgument when absent.
    const ResultCell& at(const ResultKey& key) const;

    std::string to_csv() const;
    std::string to_text() const;

    static ResultTable from_csv(std::istream& is, const std::string& source = "<results>");

private:
    std::vector<ResultCell> cells_;
};

}  // namespace gridfuse
