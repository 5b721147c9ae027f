#include "relct/database.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace relct {

DatabaseInstance::DatabaseInstance(std::shared_ptr<const Schema> schema)
    : schema_(std::move(schema)) {
    for (const auto &pop : schema_->populations())
        entity_tables_.emplace(pop.name, EntityTable{});
    for (const auto &rel : schema_->relationships())
        rel_tables_.emplace(rel.name, RelationshipTable{});
}

const EntityTable &DatabaseInstance::entities(const std::string &population) const {
    auto it = entity_tables_.find(population);
    if (it == entity_tables_.end())
        throw DataError("unknown population '" + population + "'");
    return it->second;
}

const RelationshipTable &DatabaseInstance::tuples(const std::string &relationship) const {
    auto it = rel_tables_.find(relationship);
    if (it == rel_tables_.end())
        throw DataError("unknown relationship '" + relationship + "'");
    return it->second;
}

namespace {

std::vector<ValueIndex> encode_values(const std::string &table_kind, const std::string &name,
                                      const std::vector<AttributeDecl> &attrs,
                                      const std::vector<std::string> &values) {
    if (values.size() != attrs.size())
        throw DataError(table_kind + " '" + name + "': expected " +
                        std::to_string(attrs.size()) + " attribute values, got " +
                        std::to_string(values.size()));
    std::vector<ValueIndex> encoded(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto &attr = attrs[i];
        if (values[i] == k_not_applicable)
            throw DataError(table_kind + " '" + name + "': raw data may not contain 'n/a' (" +
                            attr.name + ")");
        auto it = std::find(attr.domain.begin(), attr.domain.end(), values[i]);
        if (it == attr.domain.end())
            throw DataError(table_kind + " '" + name + "': value '" + values[i] +
                            "' outside the declared domain of '" + attr.name + "'");
        encoded[i] = static_cast<ValueIndex>(it - attr.domain.begin());
    }
    return encoded;
}

}

void DatabaseInstance::insert_entity(const std::string &population, const std::string &key,
                                     const std::vector<std::string> &attribute_values) {
    const auto &pop = schema_->population(population);
    auto &table = entity_tables_.at(population);
    if (table.index.contains(key))
        throw DataError("population '" + population + "': duplicate key '" + key + "'");
    auto encoded = encode_values("population", population, pop.attributes, attribute_values);
    table.index.emplace(key, static_cast<EntityId>(table.keys.size()));
    table.keys.push_back(key);
    table.attribute_rows.push_back(std::move(encoded));
}

void DatabaseInstance::insert_relationship_tuple(const std::string &relationship,
                                                 const std::string &key1, const std::string &key2,
                                                 const std::vector<std::string> &attribute_values) {
    const auto &rel = schema_->relationship(relationship);
    auto &table = rel_tables_.at(relationship);

    auto resolve = [this, &relationship](const RelationshipSlot &slot, const std::string &key) {
        const auto &entities = entity_tables_.at(slot.population);
        auto it = entities.index.find(key);
        if (it == entities.index.end())
            throw DataError("relationship '" + relationship + "': dangling foreign key '" + key +
                            "' into population '" + slot.population + "'");
        return it->second;
    };
    EntityId first = resolve(rel.slots[0], key1);
    EntityId second = resolve(rel.slots[1], key2);

    auto encoded = encode_values("relationship", relationship, rel.attributes, attribute_values);
    auto pair = RelationshipTable::pair_key(first, second);
    if (table.pair_index.contains(pair))
        throw DataError("relationship '" + relationship + "': duplicate tuple (" + key1 + ", " +
                        key2 + ")");
    table.pair_index.emplace(pair, static_cast<std::uint32_t>(table.tuples.size()));
    table.tuples.push_back({first, second, std::move(encoded)});
}

bool DatabaseInstance::same_content(const DatabaseInstance &other) const {
    for (const auto &pop : schema_->populations()) {
        const auto &a = entities(pop.name);
        const auto &b = other.entities(pop.name);
        if (a.keys != b.keys || a.attribute_rows != b.attribute_rows)
            return false;
    }
    for (const auto &rel : schema_->relationships()) {
        const auto &a = tuples(rel.name);
        const auto &b = other.tuples(rel.name);
        if (a.tuples.size() != b.tuples.size())
            return false;
        for (std::size_t i = 0; i < a.tuples.size(); ++i) {
            const auto &ta = a.tuples[i];
            const auto &tb = b.tuples[i];
            if (ta.first != tb.first || ta.second != tb.second ||
                ta.attribute_values != tb.attribute_values)
                return false;
        }
    }
    return true;
}

/*----------------------------------------------------------------------------------------------
 * CSV loading
 *--------------------------------------------------------------------------------------------*/

namespace {

std::vector<std::string> split_csv_line(const std::string &line) {
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
        } else {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("missing file '" + path.string() + "'");
    CsvTable table;
    std::string line;
    if (!std::getline(in, line))
        throw DataError("'" + path.string() + "' has no header row");
    table.header = split_csv_line(line);
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        auto fields = split_csv_line(line);
        if (fields.size() != table.header.size())
            throw DataError("'" + path.string() + "': row width does not match the header");
        table.rows.push_back(std::move(fields));
    }
    return table;
}

// Column positions for the expected names; every header column must be accounted for.
std::vector<std::size_t> resolve_columns(const CsvTable &csv, const std::filesystem::path &path,
                                         const std::vector<std::string> &expected) {
    for (const auto &name : csv.header)
        if (std::find(expected.begin(), expected.end(), name) == expected.end())
            throw DataError("'" + path.string() + "': unknown column '" + name + "'");
    std::vector<std::size_t> positions(expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        auto it = std::find(csv.header.begin(), csv.header.end(), expected[i]);
        if (it == csv.header.end())
            throw DataError("'" + path.string() + "': missing column '" + expected[i] + "'");
        positions[i] = static_cast<std::size_t>(it - csv.header.begin());
    }
    return positions;
}

}

DatabaseInstance load_database(std::shared_ptr<const Schema> schema,
                               const std::filesystem::path &dir) {
    DatabaseInstance db(schema);

    for (const auto &pop : schema->populations()) {
        auto path = dir / (pop.table + ".csv");
        auto csv = read_csv(path);
        std::vector<std::string> expected{pop.key_column};
        for (const auto &attr : pop.attributes)
            expected.push_back(attr.name);
        auto pos = resolve_columns(csv, path, expected);
        for (const auto &row : csv.rows) {
            std::vector<std::string> values;
            for (std::size_t i = 1; i < expected.size(); ++i)
                values.push_back(row[pos[i]]);
            db.insert_entity(pop.name, row[pos[0]], values);
        }
    }

    for (const auto &rel : schema->relationships()) {
        auto path = dir / (rel.table + ".csv");
        auto csv = read_csv(path);
        // key columns carry the slot's first-order variable name
        std::vector<std::string> expected{rel.slots[0].variable, rel.slots[1].variable};
        for (const auto &attr : rel.attributes)
            expected.push_back(attr.name);
        auto pos = resolve_columns(csv, path, expected);
        for (const auto &row : csv.rows) {
            std::vector<std::string> values;
            for (std::size_t i = 2; i < expected.size(); ++i)
                values.push_back(row[pos[i]]);
            db.insert_relationship_tuple(rel.name, row[pos[0]], row[pos[1]], values);
        }
    }

    return db;
}

DatabaseInstance load_database(const Schema &schema, const std::filesystem::path &dir) {
    return load_database(std::make_shared<Schema>(schema), dir);
}

namespace {

void write_field(std::ostream &os, const std::string &field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) {
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

}

void export_database(const DatabaseInstance &db, const std::filesystem::path &dir) {
    std::filesystem::create_directories(dir);
    const auto &schema = db.schema();

    for (const auto &pop : schema.populations()) {
        std::ofstream out(dir / (pop.table + ".csv"), std::ios::binary);
        write_field(out, pop.key_column);
        for (const auto &attr : pop.attributes) {
            out << ',';
            write_field(out, attr.name);
        }
        out << '\n';
        const auto &table = db.entities(pop.name);
        for (std::size_t e = 0; e < table.size(); ++e) {
            write_field(out, table.keys[e]);
            for (std::size_t a = 0; a < pop.attributes.size(); ++a) {
                out << ',';
                write_field(out, pop.attributes[a].domain[table.attribute_rows[e][a]]);
            }
            out << '\n';
        }
    }

    for (const auto &rel : schema.relationships()) {
        std::ofstream out(dir / (rel.table + ".csv"), std::ios::binary);
        write_field(out, rel.slots[0].variable);
        out << ',';
        write_field(out, rel.slots[1].variable);
        for (const auto &attr : rel.attributes) {
            out << ',';
            write_field(out, attr.name);
        }
        out << '\n';
        const auto &first_keys = db.entities(rel.slots[0].population).keys;
        const auto &second_keys = db.entities(rel.slots[1].population).keys;
        for (const auto &tuple : db.tuples(rel.name).tuples) {
            write_field(out, first_keys[tuple.first]);
            out << ',';
            write_field(out, second_keys[tuple.second]);
            for (std::size_t a = 0; a < rel.attributes.size(); ++a) {
                out << ',';
                write_field(out, rel.attributes[a].domain[tuple.attribute_values[a]]);
            }
            out << '\n';
        }
    }
}

std::size_t population_size(const DatabaseInstance &db, const std::string &population) {
    return db.entities(population).size();
}

}
