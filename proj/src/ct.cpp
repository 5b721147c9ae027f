#include "relct/ct.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace relct {

Count checked_add(Count a, Count b) {
    Count out;
    if (__builtin_add_overflow(a, b, &out))
        throw AlgebraError("count overflow in addition");
    return out;
}

Count checked_mul(Count a, Count b) {
    Count out;
    if (__builtin_mul_overflow(a, b, &out))
        throw AlgebraError("count overflow in multiplication");
    return out;
}

ContingencyTable::ContingencyTable(CatalogPtr catalog, std::vector<VarId> columns)
    : catalog_(std::move(catalog)), columns_(std::move(columns)) {
    std::sort(columns_.begin(), columns_.end(), [this](VarId a, VarId b) {
        return (*catalog_)[a].name < (*catalog_)[b].name;
    });
    for (std::size_t i = 1; i < columns_.size(); ++i)
        if (columns_[i] == columns_[i - 1])
            throw AlgebraError("duplicate column '" + (*catalog_)[columns_[i]].name + "'");
}

std::optional<std::size_t> ContingencyTable::column_position(VarId var) const {
    for (std::size_t i = 0; i < columns_.size(); ++i)
        if (columns_[i] == var)
            return i;
    return std::nullopt;
}

Count ContingencyTable::total() const {
    Count sum = 0;
    for (const auto &[row, count] : rows_)
        sum = checked_add(sum, count);
    return sum;
}

void ContingencyTable::add_row(Row row, Count count) {
    if (count <= 0)
        throw AlgebraError("rows must carry a positive count");
    if (row.size() != columns_.size())
        throw AlgebraError("row width does not match the column set");
    auto [it, inserted] = rows_.try_emplace(std::move(row), count);
    if (!inserted)
        it->second = checked_add(it->second, count);
}

Count ContingencyTable::count_of(const Row &row) const {
    auto it = rows_.find(row);
    return it == rows_.end() ? 0 : it->second;
}

std::vector<std::string> ContingencyTable::row_values(const Row &row) const {
    std::vector<std::string> values;
    values.reserve(row.size());
    for (std::size_t i = 0; i < row.size(); ++i)
        values.push_back(catalog_->value_name(columns_[i], row[i]));
    return values;
}

std::vector<std::string> ContingencyTable::column_names() const {
    std::vector<std::string> names;
    names.reserve(columns_.size());
    for (VarId var : columns_)
        names.push_back((*catalog_)[var].name);
    return names;
}

/*----------------------------------------------------------------------------------------------
 * Condition
 *--------------------------------------------------------------------------------------------*/

Condition::Condition(const VariableCatalog &catalog,
                     std::initializer_list<std::pair<std::string, std::string>> init) {
    for (const auto &[name, value] : init) {
        VarId var = catalog.id_of(name);
        if (value == "*")
            wildcard(var);
        else
            equal(var, catalog.value_index(var, value));
    }
}

Condition Condition::all_true(const VariableCatalog &catalog, std::span<const VarId> vars) {
    Condition cond;
    for (VarId var : vars)
        cond.equal(var, VariableCatalog::true_index());
    return cond;
}

Condition &Condition::equal(VarId var, ValueIndex value) {
    terms.push_back({var, value});
    return *this;
}

Condition &Condition::wildcard(VarId var) {
    terms.push_back({var, std::nullopt});
    return *this;
}

std::vector<VarId> Condition::variables() const {
    std::vector<VarId> vars;
    vars.reserve(terms.size());
    for (const auto &term : terms)
        vars.push_back(term.var);
    return vars;
}

/*----------------------------------------------------------------------------------------------
 * Operators
 *--------------------------------------------------------------------------------------------*/

namespace {

// Positions of the condition's terms within the table, value-bearing terms only.
std::vector<std::pair<std::size_t, ValueIndex>> bound_positions(const ContingencyTable &ct,
                                                                const Condition &condition) {
    std::vector<std::pair<std::size_t, ValueIndex>> bound;
    for (const auto &term : condition.terms) {
        auto pos = ct.column_position(term.var);
        if (!pos)
            throw AlgebraError("condition references unknown column '" +
                               (*ct.catalog())[term.var].name + "'");
        if (term.value)
            bound.emplace_back(*pos, *term.value);
    }
    return bound;
}

bool matches(const Row &row, const std::vector<std::pair<std::size_t, ValueIndex>> &bound) {
    for (const auto &[pos, value] : bound)
        if (row[pos] != value)
            return false;
    return true;
}

// Per-output-column source positions in the input row.
std::vector<std::size_t> projection_map(const ContingencyTable &in, const ContingencyTable &out) {
    std::vector<std::size_t> map;
    map.reserve(out.columns().size());
    for (VarId var : out.columns()) {
        auto pos = in.column_position(var);
        if (!pos)
            throw AlgebraError("unknown column '" + (*in.catalog())[var].name + "'");
        map.push_back(*pos);
    }
    return map;
}

}

ContingencyTable select(const ContingencyTable &ct, const Condition &condition) {
    auto bound = bound_positions(ct, condition);
    ContingencyTable out(ct.catalog(), ct.columns());
    for (const auto &[row, count] : ct.rows())
        if (matches(row, bound))
            out.add_row(row, count);
    return out;
}

ContingencyTable project(const ContingencyTable &ct, std::span<const VarId> vars) {
    ContingencyTable out(ct.catalog(), std::vector<VarId>(vars.begin(), vars.end()));
    auto map = projection_map(ct, out);
    Row key(map.size());
    for (const auto &[row, count] : ct.rows()) {
        for (std::size_t i = 0; i < map.size(); ++i)
            key[i] = row[map[i]];
        out.add_row(key, count);
    }
    return out;
}

ContingencyTable condition(const ContingencyTable &ct, const Condition &cond) {
    auto selected = select(ct, cond);
    std::set<VarId> dropped(cond.variables().begin(), cond.variables().end());
    std::vector<VarId> kept;
    for (VarId var : ct.columns())
        if (!dropped.contains(var))
            kept.push_back(var);
    return project(selected, kept);
}

ContingencyTable cross_product(const ContingencyTable &ct1, const ContingencyTable &ct2) {
    if (ct1.catalog() != ct2.catalog())
        throw AlgebraError("cross product operands come from different catalogs");
    for (VarId var : ct1.columns())
        if (ct2.has_column(var))
            throw AlgebraError("cross product operands share column '" +
                               (*ct1.catalog())[var].name + "'");

    std::vector<VarId> columns = ct1.columns();
    columns.insert(columns.end(), ct2.columns().begin(), ct2.columns().end());
    ContingencyTable out(ct1.catalog(), std::move(columns));

    // Output positions of each operand's columns.
    std::vector<std::size_t> pos1, pos2;
    for (VarId var : ct1.columns())
        pos1.push_back(*out.column_position(var));
    for (VarId var : ct2.columns())
        pos2.push_back(*out.column_position(var));

    Row key(out.width());
    for (const auto &[row1, count1] : ct1.rows()) {
        for (std::size_t i = 0; i < pos1.size(); ++i)
            key[pos1[i]] = row1[i];
        for (const auto &[row2, count2] : ct2.rows()) {
            for (std::size_t i = 0; i < pos2.size(); ++i)
                key[pos2[i]] = row2[i];
            out.add_row(key, checked_mul(count1, count2));
        }
    }
    return out;
}

namespace {

void require_same_columns(const ContingencyTable &ct1, const ContingencyTable &ct2,
                          const char *op) {
    if (ct1.catalog() != ct2.catalog())
        throw AlgebraError(std::string(op) + " operands come from different catalogs");
    if (ct1.columns() != ct2.columns())
        throw AlgebraError(std::string(op) + " operands have different column sets");
}

}

ContingencyTable add(const ContingencyTable &ct1, const ContingencyTable &ct2) {
    require_same_columns(ct1, ct2, "add");
    ContingencyTable out(ct1.catalog(), ct1.columns());
    for (const auto &[row, count] : ct1.rows())
        out.add_row(row, count);
    for (const auto &[row, count] : ct2.rows())
        out.add_row(row, count);
    return out;
}

ContingencyTable subtract(const ContingencyTable &ct1, const ContingencyTable &ct2) {
    require_same_columns(ct1, ct2, "subtract");
    for (const auto &[row, count] : ct2.rows()) {
        Count have = ct1.count_of(row);
        if (have == 0)
            throw AlgebraError("subtraction undefined: row missing from the minuend");
        if (have < count)
            throw AlgebraError("subtraction undefined: count would become negative");
    }
    ContingencyTable out(ct1.catalog(), ct1.columns());
    for (const auto &[row, count] : ct1.rows()) {
        Count remainder = count - ct2.count_of(row);
        if (remainder > 0) // rows reaching 0 are dropped
            out.add_row(row, remainder);
    }
    return out;
}

ContingencyTable extend_with_constants(const ContingencyTable &ct,
                                       std::span<const std::pair<VarId, ValueIndex>> constants) {
    std::vector<VarId> columns = ct.columns();
    for (const auto &[var, value] : constants) {
        if (ct.has_column(var))
            throw AlgebraError("extension column '" + (*ct.catalog())[var].name +
                               "' already present");
        columns.push_back(var);
    }
    ContingencyTable out(ct.catalog(), std::move(columns));

    std::vector<std::size_t> src_pos;
    for (VarId var : ct.columns())
        src_pos.push_back(*out.column_position(var));
    std::vector<std::pair<std::size_t, ValueIndex>> fixed;
    for (const auto &[var, value] : constants)
        fixed.emplace_back(*out.column_position(var), value);

    Row key(out.width());
    for (const auto &[pos, value] : fixed)
        key[pos] = value;
    for (const auto &[row, count] : ct.rows()) {
        for (std::size_t i = 0; i < src_pos.size(); ++i)
            key[src_pos[i]] = row[i];
        out.add_row(key, count);
    }
    out.provenance = ct.provenance;
    return out;
}

ContingencyTable extend_with_constant(const ContingencyTable &ct, VarId column, ValueIndex value) {
    std::pair<VarId, ValueIndex> one[] = {{column, value}};
    return extend_with_constants(ct, one);
}

ContingencyTable union_disjoint(const ContingencyTable &ct1, const ContingencyTable &ct2) {
    require_same_columns(ct1, ct2, "union");
    ContingencyTable out(ct1.catalog(), ct1.columns());
    for (const auto &[row, count] : ct1.rows())
        out.add_row(row, count);
    for (const auto &[row, count] : ct2.rows()) {
        if (out.count_of(row) != 0)
            throw AlgebraError("union operands share a row");
        out.add_row(row, count);
    }
    return out;
}

/*----------------------------------------------------------------------------------------------
 * Comparison and serialization
 *--------------------------------------------------------------------------------------------*/

namespace {

// name-keyed view of a table: column names and string-valued rows
std::map<std::vector<std::string>, Count> value_rows(const ContingencyTable &ct) {
    std::map<std::vector<std::string>, Count> rows;
    for (const auto &[row, count] : ct.rows())
        rows.emplace(ct.row_values(row), count);
    return rows;
}

}

bool tables_equal(const ContingencyTable &a, const ContingencyTable &b) {
    return !first_table_difference(a, b).has_value();
}

std::optional<std::string> first_table_difference(const ContingencyTable &a,
                                                  const ContingencyTable &b) {
    if (a.column_names() != b.column_names()) {
        std::ostringstream os;
        os << "column sets differ: [";
        for (const auto &n : a.column_names())
            os << n << ' ';
        os << "] vs [";
        for (const auto &n : b.column_names())
            os << n << ' ';
        os << ']';
        return os.str();
    }
    auto rows_a = value_rows(a);
    auto rows_b = value_rows(b);
    auto render = [](const std::vector<std::string> &values) {
        std::string s = "(";
        for (std::size_t i = 0; i < values.size(); ++i)
            s += (i ? "," : "") + values[i];
        return s + ")";
    };
    auto it_a = rows_a.begin();
    auto it_b = rows_b.begin();
    while (it_a != rows_a.end() || it_b != rows_b.end()) {
        if (it_b == rows_b.end() || (it_a != rows_a.end() && it_a->first < it_b->first))
            return "first differing row: " + render(it_a->first) + " count " +
                   std::to_string(it_a->second) + " vs absent";
        if (it_a == rows_a.end() || it_b->first < it_a->first)
            return "first differing row: " + render(it_b->first) + " absent vs count " +
                   std::to_string(it_b->second);
        if (it_a->second != it_b->second)
            return "first differing row: " + render(it_a->first) + " count " +
                   std::to_string(it_a->second) + " vs " + std::to_string(it_b->second);
        ++it_a;
        ++it_b;
    }
    return std::nullopt;
}

namespace {

bool needs_quoting(const std::string &field) {
    return field.find_first_of(",\"\n\r") != std::string::npos;
}

void write_field(std::ostream &os, const std::string &field) {
    if (!needs_quoting(field)) {
        os << field;
        return;
    }
    os << '"';
    for (char c : field) {
        if (c == '"')
            os << '"';
        os << c;
    }
    os << '"';
}

std::vector<std::string> parse_csv_line(const std::string &line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\r') {
            // tolerate CRLF
        } else {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

}

std::string ct_to_csv(const ContingencyTable &ct) {
    std::ostringstream os;
    auto names = ct.column_names();
    for (const auto &name : names) {
        write_field(os, name);
        os << ',';
    }
    os << "count\n";

    std::map<std::vector<std::string>, Count> sorted = value_rows(ct);
    for (const auto &[values, count] : sorted) {
        for (const auto &value : values) {
            write_field(os, value);
            os << ',';
        }
        os << count << '\n';
    }
    return os.str();
}

void write_ct_csv(const ContingencyTable &ct, const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write '" + path.string() + "'");
    out << ct_to_csv(ct);
}

ContingencyTable read_ct_csv(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open '" + path.string() + "'");

    std::string line;
    if (!std::getline(in, line))
        throw DataError("'" + path.string() + "' is empty");
    auto header = parse_csv_line(line);
    if (header.empty() || header.back() != "count")
        throw DataError("'" + path.string() + "' lacks a trailing count column");
    header.pop_back();

    std::vector<std::vector<std::string>> records;
    std::vector<Count> counts;
    std::vector<std::set<std::string>> domains(header.size());
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        auto fields = parse_csv_line(line);
        if (fields.size() != header.size() + 1)
            throw DataError("'" + path.string() + "': row width does not match the header");
        Count count = 0;
        try {
            count = std::stoll(fields.back());
        } catch (const std::exception &) {
            throw DataError("'" + path.string() + "': malformed count '" + fields.back() + "'");
        }
        fields.pop_back();
        for (std::size_t i = 0; i < fields.size(); ++i)
            domains[i].insert(fields[i]);
        records.push_back(std::move(fields));
        counts.push_back(count);
    }

    // Ad-hoc catalog: each column becomes an attribute whose domain is its observed values.
    std::vector<RandomVariable> vars;
    for (std::size_t i = 0; i < header.size(); ++i) {
        std::vector<std::string> domain(domains[i].begin(), domains[i].end());
        if (domain.empty())
            domain.push_back(k_not_applicable);
        vars.push_back({VarKind::entity_attribute, header[i], header[i], std::move(domain)});
    }
    auto catalog = VariableCatalog::from_variables(std::move(vars));

    std::vector<VarId> columns(header.size());
    for (std::size_t i = 0; i < header.size(); ++i)
        columns[i] = catalog->id_of(header[i]);
    ContingencyTable ct(catalog, columns);
    Row row(header.size());
    for (std::size_t rec = 0; rec < records.size(); ++rec) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            auto pos = ct.column_position(columns[i]);
            row[*pos] = catalog->value_index(columns[i], records[rec][i]);
        }
        ct.add_row(row, counts[rec]);
    }
    return ct;
}

}
