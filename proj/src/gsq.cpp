#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "chatpc/errors.hpp"
#include "chatpc/oracle.hpp"
#include "chatpc/stats.hpp"

namespace chatpc {

namespace {

std::vector<std::string> split_line(const std::string& line, char delimiter) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, delimiter)) out.push_back(field);
    if (!line.empty() && line.back() == delimiter) out.emplace_back();
    return out;
}

}  // namespace

SampleTable SampleTable::from_csv(std::istream& in, char delimiter) {
    SampleTable t;
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("sample table is empty (no header row)");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    t.columns = split_line(line, delimiter);
    if (t.columns.empty()) throw SchemaError("sample table header has no columns");
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto row = split_line(line, delimiter);
        if (row.size() != t.columns.size()) {
            std::ostringstream msg;
            msg << "row " << lineno << " has " << row.size() << " fields, expected "
                << t.columns.size();
            throw SchemaError(msg.str());
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

SampleTable SampleTable::from_csv_file(const std::string& path, char delimiter) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open sample table: " + path);
    return from_csv(in, delimiter);
}

OracleVerdict gsq_ci_test(const SampleTable& data, const CiQuery& q, double alpha,
                          long min_rows) {
    const int xi = data.column_index(q.x);
    const int yi = data.column_index(q.y);
    std::vector<int> zi;
    zi.reserve(q.z.size());
    for (const auto& name : q.z) zi.push_back(data.column_index(name));

    if (static_cast<long>(data.rows.size()) < min_rows) {
        std::ostringstream msg;
        msg << "sample table holds " << data.rows.size() << " rows, below the floor of "
            << min_rows;
        throw InsufficientData(msg.str());
    }

    // Counts per z-stratum; category sets for the dof formula span the table.
    std::set<std::string> x_levels, y_levels;
    struct Stratum {
        std::map<std::pair<std::string, std::string>, long> cell;
        std::map<std::string, long> row_sum, col_sum;
        long total = 0;
    };
    std::map<std::vector<std::string>, Stratum> strata;

    for (const auto& row : data.rows) {
        const std::string& xv = row[static_cast<std::size_t>(xi)];
        const std::string& yv = row[static_cast<std::size_t>(yi)];
        std::vector<std::string> key;
        key.reserve(zi.size());
        for (int c : zi) key.push_back(row[static_cast<std::size_t>(c)]);
        x_levels.insert(xv);
        y_levels.insert(yv);
        Stratum& s = strata[key];
        ++s.cell[{xv, yv}];
        ++s.row_sum[xv];
        ++s.col_sum[yv];
        ++s.total;
    }

    double g2 = 0.0;
    for (const auto& [key, s] : strata) {
        for (const auto& [xy, count] : s.cell) {
            const double expected = static_cast<double>(s.row_sum.at(xy.first)) *
                                    static_cast<double>(s.col_sum.at(xy.second)) /
                                    static_cast<double>(s.total);
            g2 += 2.0 * static_cast<double>(count) *
                  std::log(static_cast<double>(count) / expected);
        }
    }
    g2 = std::max(g2, 0.0);  // guards tiny negative round-off

    const long dof = static_cast<long>(x_levels.size() - 1) *
                     static_cast<long>(y_levels.size() - 1) *
                     static_cast<long>(strata.size());
    const double p = stats::chi_square_upper_tail(g2, static_cast<int>(dof));

    OracleVerdict v;
    v.source = "gsq";
    v.g_squared = g2;
    v.dof = dof;
    v.decision.method = "statistical";
    v.decision.alpha = alpha;
    v.decision.p_value = p;
    v.decision.outcome = p > alpha ? Outcome::INDEPENDENT : Outcome::DEPENDENT;
    return v;
}

}  // namespace chatpc
