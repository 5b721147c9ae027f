#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relct/schema.hpp"

namespace relct {

/** An ordered list of relationship names in which every relationship after the first shares at
 * least one first-order variable with the union of its predecessors. */
class RelationshipChain {
  public:
    /** Validates connectivity in the given order. */
    static RelationshipChain ordered(const Schema &schema, std::vector<std::string> relationships);

    /** Canonical chain for a connected relationship set: the lexicographically smallest valid
     * ordering.  Returns nullopt when the set admits no connected ordering. */
    static std::optional<RelationshipChain> from_set(const Schema &schema,
                                                     std::vector<std::string> relationship_set);

    const std::vector<std::string> &relationships() const { return relationships_; }
    std::size_t length() const { return relationships_.size(); }

    /** Set identity: sorted relationship names joined with ','. */
    std::string key() const;
    static std::string key_of(std::span<const std::string> relationship_set);

    /** First-order variables covered by the chain, sorted. */
    std::vector<std::string> first_order_variables(const Schema &schema) const;

    bool operator==(const RelationshipChain &other) const {
        return relationships_ == other.relationships_;
    }

  private:
    explicit RelationshipChain(std::vector<std::string> relationships)
        : relationships_(std::move(relationships)) {}

    std::vector<std::string> relationships_;
};

/** The subset lattice of connected relationship sets, level ℓ holding the chains of length ℓ.
 * Level 0 holds one entity node per first-order variable. */
class ChainLattice {
  public:
    /** Entity nodes: every first-order variable of the schema. */
    const std::vector<std::string> &entity_nodes() const { return entity_nodes_; }

    std::size_t max_level() const { return levels_.size(); }
    /** Chains of length `level` (1-based), in canonical order. */
    const std::vector<RelationshipChain> &level(std::size_t level) const;
    /** All chains, level by level. */
    std::vector<RelationshipChain> all_chains() const;
    std::size_t chain_count() const;

    /** Chain for a relationship set, or nullptr when the set is not in the lattice. */
    const RelationshipChain *find(std::span<const std::string> relationship_set) const;

    /** Keys of the connected (ℓ−1)-subsets of `chain`; the subset links of the lattice. */
    std::vector<std::string> sub_chain_keys(const RelationshipChain &chain) const;

    const Schema &schema() const { return *schema_; }

  private:
    friend ChainLattice enumerate_chain_lattice(const Schema &, std::size_t);

    const Schema *schema_ = nullptr;
    std::vector<std::string> entity_nodes_;
    std::vector<std::vector<RelationshipChain>> levels_;
    std::unordered_map<std::string, std::pair<std::size_t, std::size_t>> by_key_;
};

/** Enumerates all chains of length ≤ min(max_length, m) plus the entity nodes.  The returned
 * lattice borrows `schema`; the schema must outlive it. */
ChainLattice enumerate_chain_lattice(const Schema &schema, std::size_t max_length);

}
