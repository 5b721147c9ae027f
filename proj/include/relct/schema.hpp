#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "relct/errors.hpp"

namespace relct {

/** Reserved value marking a relationship attribute of an unrelated tuple.  Never valid in declared
 * domains or raw data. */
inline constexpr const char *k_not_applicable = "n/a";

struct AttributeDecl {
    std::string name;
    std::vector<std::string> domain; ///< finite, non-empty, excludes `n/a`
};

struct PopulationDecl {
    std::string name;
    std::string table;      ///< base name of the entity CSV
    std::string key_column;
    std::string variable;   ///< canonical first-order variable
    std::vector<AttributeDecl> attributes;
};

struct RelationshipSlot {
    std::string variable;   ///< first-order variable bound by this argument slot
    std::string population;
};

/** A binary relationship between two populations.  The two slot variables are distinct even when
 * both slots reference the same population (self-relationship). */
struct RelationshipDecl {
    std::string name;
    std::string table;
    std::array<RelationshipSlot, 2> slots;
    std::vector<AttributeDecl> attributes; ///< relationship attributes (2Atts)
};

/** A validated entity-relationship schema.
 *
 * First-order variables are the relationship slot variables plus, for populations referenced by no
 * relationship, the population's canonical variable.  Each variable name binds to exactly one
 * population. */
class Schema {
  public:
    static Schema validated(std::vector<PopulationDecl> populations,
                            std::vector<RelationshipDecl> relationships);

    const std::vector<PopulationDecl> &populations() const { return populations_; }
    const std::vector<RelationshipDecl> &relationships() const { return relationships_; }

    const PopulationDecl &population(const std::string &name) const;
    const RelationshipDecl &relationship(const std::string &name) const;
    bool has_relationship(const std::string &name) const;

    /** All first-order variables, sorted by name. */
    const std::vector<std::string> &first_order_variables() const { return fo_variables_; }
    const std::string &population_of_variable(const std::string &variable) const;

    /** The two slot variables of `relationship`, in slot order. */
    std::array<std::string, 2> variables_of(const std::string &relationship) const;

  private:
    Schema() = default;

    std::vector<PopulationDecl> populations_;
    std::vector<RelationshipDecl> relationships_;
    std::vector<std::string> fo_variables_;
    std::unordered_map<std::string, std::size_t> population_index_;
    std::unordered_map<std::string, std::size_t> relationship_index_;
    std::unordered_map<std::string, std::string> variable_population_;
};

/** Parses and validates a schema file (JSON, see README for the shape). */
Schema load_schema(const std::filesystem::path &path);

Schema schema_from_json_text(const std::string &text);
std::string schema_to_json_text(const Schema &schema);

/*----------------------------------------------------------------------------------------------
 * Random variables
 *--------------------------------------------------------------------------------------------*/

enum class VarKind : std::uint8_t {
    relationship,           ///< boolean, domain {F, T}
    entity_attribute,       ///< 1Att, domain as declared
    relationship_attribute, ///< 2Att, domain as declared plus trailing `n/a`
};

struct RandomVariable {
    VarKind kind;
    std::string name;  ///< qualified, e.g. `intelligence(S)`, `RA(P,S)`
    std::string owner; ///< first-order variable for 1Atts, relationship name otherwise
    std::vector<std::string> domain;
};

/** Translates the schema into its random variables: one relationship variable per relationship,
 * one 1Att per (first-order variable, entity attribute), one 2Att per (relationship, relationship
 * attribute).  Deterministic: sorted by variable name. */
std::vector<RandomVariable> derive_random_variables(const Schema &schema);

using VarId = std::uint32_t;
using ValueIndex = std::uint16_t;

/** Immutable registry of the schema's random variables; shared read-only by all contingency
 * tables derived from one schema. */
class VariableCatalog {
  public:
    static std::shared_ptr<const VariableCatalog> build(const Schema &schema);
    /** Catalog over a bare variable list; used when no schema is available (e.g. CT files read
     * back for mining). */
    static std::shared_ptr<const VariableCatalog> from_variables(std::vector<RandomVariable> vars);

    std::size_t size() const { return variables_.size(); }
    const RandomVariable &operator[](VarId id) const { return variables_[id]; }
    VarId id_of(const std::string &name) const;
    bool contains(const std::string &name) const { return index_.contains(name); }

    ValueIndex value_index(VarId id, const std::string &value) const;
    const std::string &value_name(VarId id, ValueIndex v) const {
        return variables_[id].domain[v];
    }
    std::size_t domain_size(VarId id) const { return variables_[id].domain.size(); }

    /** Index of `n/a` in a 2Att domain (always the last entry). */
    ValueIndex na_index(VarId id) const;
    static ValueIndex false_index() { return 0; }
    static ValueIndex true_index() { return 1; }

    VarId relationship_variable(const std::string &relationship_name) const;
    /** 1Atts of a first-order variable, sorted by name. */
    const std::vector<VarId> &one_atts(const std::string &fo_variable) const;
    /** 2Atts of a relationship, sorted by name. */
    const std::vector<VarId> &two_atts(const std::string &relationship_name) const;

  private:
    std::vector<RandomVariable> variables_;
    std::unordered_map<std::string, VarId> index_;
    std::unordered_map<std::string, VarId> relationship_vars_;
    std::unordered_map<std::string, std::vector<VarId>> one_atts_;
    std::unordered_map<std::string, std::vector<VarId>> two_atts_;
    std::vector<std::unordered_map<std::string, ValueIndex>> value_index_;
};

using CatalogPtr = std::shared_ptr<const VariableCatalog>;

/** `attr(X)` for 1Atts, `name(X,Y)` for relationships and 2Atts. */
std::string qualified_name(const std::string &base, const std::string &var);
std::string qualified_name(const std::string &base, const std::string &var1,
                           const std::string &var2);

}
