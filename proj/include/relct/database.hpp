#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "relct/schema.hpp"

namespace relct {

using EntityId = std::uint32_t;

struct EntityTable {
    std::vector<std::string> keys; ///< entity key values, load order
    std::unordered_map<std::string, EntityId> index;
    /** Per entity, one value per declared attribute (declared order). */
    std::vector<std::vector<ValueIndex>> attribute_rows;

    std::size_t size() const { return keys.size(); }
};

struct RelationshipTuple {
    EntityId first;
    EntityId second;
    std::vector<ValueIndex> attribute_values; ///< declared order
};

struct RelationshipTable {
    std::vector<RelationshipTuple> tuples; ///< load order; key pairs are unique
    std::unordered_map<std::uint64_t, std::uint32_t> pair_index;

    static std::uint64_t pair_key(EntityId a, EntityId b) {
        return (std::uint64_t(a) << 32) | b;
    }
    /** Tuple index for a key pair, or -1 when the pair is unrelated. */
    std::int64_t find(EntityId a, EntityId b) const {
        auto it = pair_index.find(pair_key(a, b));
        return it == pair_index.end() ? -1 : std::int64_t(it->second);
    }
};

/** Loaded tuples for every entity and relationship table.  Immutable after construction and
 * shareable across workers; the access counter tracks raw data-tuple reads performed by the
 * counting phases. */
class DatabaseInstance {
  public:
    DatabaseInstance(std::shared_ptr<const Schema> schema);

    const Schema &schema() const { return *schema_; }
    std::shared_ptr<const Schema> schema_ptr() const { return schema_; }

    const EntityTable &entities(const std::string &population) const;
    const RelationshipTable &tuples(const std::string &relationship) const;

    /** Raw data-tuple access accounting. */
    void note_tuple_accesses(std::uint64_t n) const { tuple_accesses_ += n; }
    std::uint64_t tuple_accesses() const { return tuple_accesses_.load(); }

    /** Builder interface used by the loader and the synthetic generator; validates everything. */
    void insert_entity(const std::string &population, const std::string &key,
                       const std::vector<std::string> &attribute_values);
    void insert_relationship_tuple(const std::string &relationship, const std::string &key1,
                                   const std::string &key2,
                                   const std::vector<std::string> &attribute_values);

    bool same_content(const DatabaseInstance &other) const;

  private:
    std::shared_ptr<const Schema> schema_;
    std::unordered_map<std::string, EntityTable> entity_tables_;     // by population
    std::unordered_map<std::string, RelationshipTable> rel_tables_;  // by relationship
    mutable std::atomic<std::uint64_t> tuple_accesses_{0};
};

/** Loads `<table>.csv` for every declared table under `dir` and validates referential
 * integrity. */
DatabaseInstance load_database(const Schema &schema, const std::filesystem::path &dir);
DatabaseInstance load_database(std::shared_ptr<const Schema> schema,
                               const std::filesystem::path &dir);

/** Writes the instance back out as one CSV per table; reloading yields the same instance. */
void export_database(const DatabaseInstance &db, const std::filesystem::path &dir);

/** Number of entities in a population. */
std::size_t population_size(const DatabaseInstance &db, const std::string &population);

}
