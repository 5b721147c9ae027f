#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "relct/schema.hpp"

namespace relct {

using Count = std::int64_t;

Count checked_add(Count a, Count b);
Count checked_mul(Count a, Count b);

/** A row's value tuple, aligned with the table's column order. */
using Row = std::vector<ValueIndex>;

struct RowHash {
    std::size_t operator()(const Row &row) const {
        std::size_t h = 0xcbf29ce484222325ULL;
        for (ValueIndex v : row) {
            h ^= v;
            h *= 0x100000001b3ULL;
        }
        return h;
    }
};

using RowMap = std::unordered_map<Row, Count, RowHash>;

/** A contingency table: one column per random variable plus an integer count.  Rows with count 0
 * are never stored.  Columns are kept sorted by variable name, so tables over the same variable
 * set always agree on layout. */
class ContingencyTable {
  public:
    ContingencyTable(CatalogPtr catalog, std::vector<VarId> columns);

    const CatalogPtr &catalog() const { return catalog_; }
    const std::vector<VarId> &columns() const { return columns_; }
    std::size_t width() const { return columns_.size(); }
    std::optional<std::size_t> column_position(VarId var) const;
    bool has_column(VarId var) const { return column_position(var).has_value(); }

    const RowMap &rows() const { return rows_; }
    std::size_t row_count() const { return rows_.size(); }
    bool empty() const { return rows_.empty(); }
    /** Sum of all counts (checked). */
    Count total() const;

    /** Accumulates `count` (> 0) into the row. */
    void add_row(Row row, Count count);
    Count count_of(const Row &row) const;

    /** Note recording which chain/condition produced the table. */
    std::string provenance;

    /** Row values as domain strings, in column order. */
    std::vector<std::string> row_values(const Row &row) const;
    std::vector<std::string> column_names() const;

  private:
    CatalogPtr catalog_;
    std::vector<VarId> columns_;
    RowMap rows_;
};

/** Conjunction of (variable = value) terms; a nullopt value is the wildcard `*`. */
struct Condition {
    struct Term {
        VarId var;
        std::optional<ValueIndex> value; ///< nullopt = `*`
    };
    std::vector<Term> terms;

    Condition() = default;
    /** Builds from (variable name, value string) pairs; "*" selects the wildcard. */
    Condition(const VariableCatalog &catalog,
              std::initializer_list<std::pair<std::string, std::string>> terms);
    static Condition all_true(const VariableCatalog &catalog, std::span<const VarId> vars);

    Condition &equal(VarId var, ValueIndex value);
    Condition &wildcard(VarId var);
    bool empty() const { return terms.empty(); }
    std::vector<VarId> variables() const;
};

/*----------------------------------------------------------------------------------------------
 * Algebra operators
 *--------------------------------------------------------------------------------------------*/

/** Rows satisfying φ; columns and counts unchanged. */
ContingencyTable select(const ContingencyTable &ct, const Condition &condition);

/** Groups rows by `vars` (a subset of the columns); counts are summed per group. */
ContingencyTable project(const ContingencyTable &ct, std::span<const VarId> vars);

/** χφ ct = project(select(ct, φ), columns ∖ φ columns): filters on φ, then drops its columns. */
ContingencyTable condition(const ContingencyTable &ct, const Condition &condition);

/** Cartesian product of the rows of two tables over disjoint columns; counts multiply. */
ContingencyTable cross_product(const ContingencyTable &ct1, const ContingencyTable &ct2);

/** Adds counts of matching rows; a row present in only one operand keeps its count. */
ContingencyTable add(const ContingencyTable &ct1, const ContingencyTable &ct2);

/** Per-row difference.  Defined only when ct1's rows are a superset of ct2's and dominate their
 * counts; anything else signals inconsistent inputs.  Rows reaching 0 are dropped. */
ContingencyTable subtract(const ContingencyTable &ct1, const ContingencyTable &ct2);

/** Every row gains column = value; counts unchanged. */
ContingencyTable extend_with_constant(const ContingencyTable &ct, VarId column, ValueIndex value);
ContingencyTable extend_with_constants(const ContingencyTable &ct,
                                       std::span<const std::pair<VarId, ValueIndex>> constants);

/** Concatenation of two tables over the same columns with disjoint row sets. */
ContingencyTable union_disjoint(const ContingencyTable &ct1, const ContingencyTable &ct2);

/*----------------------------------------------------------------------------------------------
 * Comparison and serialization
 *--------------------------------------------------------------------------------------------*/

/** Equality by column names and value strings; safe across catalogs. */
bool tables_equal(const ContingencyTable &a, const ContingencyTable &b);

/** First difference between two tables, rendered for diagnostics; nullopt when equal. */
std::optional<std::string> first_table_difference(const ContingencyTable &a,
                                                  const ContingencyTable &b);

/** CSV: header = column names + `count`; rows sorted lexicographically by value tuple. */
void write_ct_csv(const ContingencyTable &ct, const std::filesystem::path &path);
std::string ct_to_csv(const ContingencyTable &ct);

/** Reads a CT CSV written by `write_ct_csv`.  The catalog is reconstructed from the file, with
 * each column's domain being its observed values. */
ContingencyTable read_ct_csv(const std::filesystem::path &path);

}
