#include "relct/schema.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace relct {

namespace {

void check(bool ok, const std::string &message) {
    if (!ok)
        throw SchemaError(message);
}

void validate_domain(const std::string &what, const std::vector<AttributeDecl> &attrs) {
    for (const auto &attr : attrs) {
        check(!attr.domain.empty(), what + " attribute '" + attr.name + "' has an empty domain");
        std::set<std::string> seen;
        for (const auto &value : attr.domain) {
            check(value != k_not_applicable,
                  what + " attribute '" + attr.name + "' declares the reserved value 'n/a'");
            check(seen.insert(value).second,
                  what + " attribute '" + attr.name + "' declares duplicate value '" + value + "'");
        }
        check(attr.domain.size() <= 0xFFFE,
              what + " attribute '" + attr.name + "' domain is too large");
    }
}

}

Schema Schema::validated(std::vector<PopulationDecl> populations,
                         std::vector<RelationshipDecl> relationships) {
    Schema schema;
    schema.populations_ = std::move(populations);
    schema.relationships_ = std::move(relationships);

    for (std::size_t i = 0; i < schema.populations_.size(); ++i) {
        const auto &pop = schema.populations_[i];
        check(!pop.name.empty(), "population with empty name");
        check(!pop.key_column.empty(), "population '" + pop.name + "' has no key column");
        check(!pop.variable.empty(), "population '" + pop.name + "' has no canonical variable");
        check(schema.population_index_.emplace(pop.name, i).second,
              "duplicate population name '" + pop.name + "'");
        validate_domain("entity", pop.attributes);
        std::set<std::string> attr_names;
        for (const auto &attr : pop.attributes)
            check(attr_names.insert(attr.name).second,
                  "population '" + pop.name + "' declares duplicate attribute '" + attr.name + "'");
    }

    auto bind_variable = [&schema](const std::string &variable, const std::string &population) {
        check(schema.population_index_.contains(population),
              "unknown population '" + population + "'");
        auto [it, inserted] = schema.variable_population_.emplace(variable, population);
        check(inserted || it->second == population,
              "first-order variable '" + variable + "' bound to two populations");
    };

    for (std::size_t i = 0; i < schema.relationships_.size(); ++i) {
        const auto &rel = schema.relationships_[i];
        check(!rel.name.empty(), "relationship with empty name");
        check(schema.relationship_index_.emplace(rel.name, i).second,
              "duplicate relationship name '" + rel.name + "'");
        check(rel.slots[0].variable != rel.slots[1].variable,
              "non-binary relationship '" + rel.name +
                  "': the two slot variables must be distinct");
        for (const auto &slot : rel.slots) {
            check(!slot.variable.empty(), "relationship '" + rel.name + "' has an unnamed slot");
            bind_variable(slot.variable, slot.population);
        }
        validate_domain("relationship", rel.attributes);
        std::set<std::string> attr_names;
        for (const auto &attr : rel.attributes)
            check(attr_names.insert(attr.name).second,
                  "relationship '" + rel.name + "' declares duplicate attribute '" + attr.name +
                      "'");
    }

    // Populations outside every relationship still get an entity node under their canonical
    // variable.
    for (const auto &pop : schema.populations_) {
        bool referenced = false;
        for (const auto &rel : schema.relationships_)
            for (const auto &slot : rel.slots)
                referenced |= slot.population == pop.name;
        if (!referenced)
            bind_variable(pop.variable, pop.name);
    }

    for (const auto &[variable, population] : schema.variable_population_)
        schema.fo_variables_.push_back(variable);
    std::sort(schema.fo_variables_.begin(), schema.fo_variables_.end());

    // Qualified variable names must be globally unique; delegating to the translation catches
    // collisions such as a population named like a relationship.
    std::set<std::string> qualified;
    for (const auto &rv : derive_random_variables(schema))
        check(qualified.insert(rv.name).second, "duplicate random variable '" + rv.name + "'");

    return schema;
}

const PopulationDecl &Schema::population(const std::string &name) const {
    auto it = population_index_.find(name);
    if (it == population_index_.end())
        throw SchemaError("unknown population '" + name + "'");
    return populations_[it->second];
}

const RelationshipDecl &Schema::relationship(const std::string &name) const {
    auto it = relationship_index_.find(name);
    if (it == relationship_index_.end())
        throw SchemaError("unknown relationship '" + name + "'");
    return relationships_[it->second];
}

bool Schema::has_relationship(const std::string &name) const {
    return relationship_index_.contains(name);
}

const std::string &Schema::population_of_variable(const std::string &variable) const {
    auto it = variable_population_.find(variable);
    if (it == variable_population_.end())
        throw SchemaError("unknown first-order variable '" + variable + "'");
    return it->second;
}

std::array<std::string, 2> Schema::variables_of(const std::string &relationship_name) const {
    const auto &rel = relationship(relationship_name);
    return {rel.slots[0].variable, rel.slots[1].variable};
}

/*----------------------------------------------------------------------------------------------
 * JSON schema format
 *--------------------------------------------------------------------------------------------*/

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<AttributeDecl> parse_attributes(const json &j) {
    std::vector<AttributeDecl> attrs;
    for (const auto &a : j) {
        AttributeDecl attr;
        attr.name = a.at("name").get<std::string>();
        for (const auto &v : a.at("domain"))
            attr.domain.push_back(v.get<std::string>());
        attrs.push_back(std::move(attr));
    }
    return attrs;
}

}

Schema schema_from_json_text(const std::string &text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception &e) {
        throw SchemaError(std::string("schema parse failure: ") + e.what());
    }

    try {
        std::vector<PopulationDecl> populations;
        for (const auto &p : j.at("populations")) {
            PopulationDecl pop;
            pop.name = p.at("name").get<std::string>();
            pop.table = p.value("table", pop.name);
            pop.key_column = p.value("key", pop.table + "_id");
            pop.variable = p.value("variable", pop.name);
            if (p.contains("attributes"))
                pop.attributes = parse_attributes(p.at("attributes"));
            populations.push_back(std::move(pop));
        }

        std::vector<RelationshipDecl> relationships;
        for (const auto &r : j.at("relationships")) {
            RelationshipDecl rel;
            rel.name = r.at("name").get<std::string>();
            rel.table = r.value("table", rel.name);
            const auto &slots = r.at("slots");
            if (slots.size() != 2)
                throw SchemaError("non-binary relationship '" + rel.name + "': expected 2 slots, got " +
                                  std::to_string(slots.size()));
            for (std::size_t i = 0; i < 2; ++i) {
                rel.slots[i].population = slots[i].at("population").get<std::string>();
                rel.slots[i].variable = slots[i].value("variable", rel.slots[i].population);
            }
            if (r.contains("attributes"))
                rel.attributes = parse_attributes(r.at("attributes"));
            relationships.push_back(std::move(rel));
        }

        return Schema::validated(std::move(populations), std::move(relationships));
    } catch (const json::exception &e) {
        throw SchemaError(std::string("schema parse failure: ") + e.what());
    }
}

Schema load_schema(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in)
        throw SchemaError("cannot open schema file '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return schema_from_json_text(buffer.str());
}

std::string schema_to_json_text(const Schema &schema) {
    ordered_json j;
    j["populations"] = ordered_json::array();
    for (const auto &pop : schema.populations()) {
        ordered_json p;
        p["name"] = pop.name;
        p["table"] = pop.table;
        p["key"] = pop.key_column;
        p["variable"] = pop.variable;
        p["attributes"] = ordered_json::array();
        for (const auto &attr : pop.attributes)
            p["attributes"].push_back({{"name", attr.name}, {"domain", attr.domain}});
        j["populations"].push_back(std::move(p));
    }
    j["relationships"] = ordered_json::array();
    for (const auto &rel : schema.relationships()) {
        ordered_json r;
        r["name"] = rel.name;
        r["table"] = rel.table;
        r["slots"] = ordered_json::array();
        for (const auto &slot : rel.slots)
            r["slots"].push_back({{"population", slot.population}, {"variable", slot.variable}});
        r["attributes"] = ordered_json::array();
        for (const auto &attr : rel.attributes)
            r["attributes"].push_back({{"name", attr.name}, {"domain", attr.domain}});
        j["relationships"].push_back(std::move(r));
    }
    return j.dump(2) + "\n";
}

/*----------------------------------------------------------------------------------------------
 * Translation into random variables
 *--------------------------------------------------------------------------------------------*/

std::string qualified_name(const std::string &base, const std::string &var) {
    return base + "(" + var + ")";
}

std::string qualified_name(const std::string &base, const std::string &var1,
                           const std::string &var2) {
    return base + "(" + var1 + "," + var2 + ")";
}

std::vector<RandomVariable> derive_random_variables(const Schema &schema) {
    std::vector<RandomVariable> vars;

    for (const auto &fo_var : schema.first_order_variables()) {
        const auto &pop = schema.population(schema.population_of_variable(fo_var));
        for (const auto &attr : pop.attributes)
            vars.push_back({VarKind::entity_attribute, qualified_name(attr.name, fo_var), fo_var,
                            attr.domain});
    }

    for (const auto &rel : schema.relationships()) {
        vars.push_back({VarKind::relationship,
                        qualified_name(rel.name, rel.slots[0].variable, rel.slots[1].variable),
                        rel.name,
                        {"F", "T"}});
        for (const auto &attr : rel.attributes) {
            auto domain = attr.domain;
            domain.push_back(k_not_applicable); // 2Att = n/a exactly when the relationship is F
            vars.push_back({VarKind::relationship_attribute,
                            qualified_name(attr.name, rel.slots[0].variable,
                                           rel.slots[1].variable),
                            rel.name, std::move(domain)});
        }
    }

    std::sort(vars.begin(), vars.end(),
              [](const RandomVariable &a, const RandomVariable &b) { return a.name < b.name; });
    return vars;
}

std::shared_ptr<const VariableCatalog>
VariableCatalog::from_variables(std::vector<RandomVariable> vars) {
    auto catalog = std::make_shared<VariableCatalog>();
    catalog->variables_ = std::move(vars);
    catalog->value_index_.resize(catalog->variables_.size());
    for (VarId id = 0; id < catalog->variables_.size(); ++id) {
        const auto &rv = catalog->variables_[id];
        if (!catalog->index_.emplace(rv.name, id).second)
            throw SchemaError("duplicate random variable '" + rv.name + "'");
        for (ValueIndex v = 0; v < rv.domain.size(); ++v)
            catalog->value_index_[id].emplace(rv.domain[v], v);
        if (rv.kind == VarKind::relationship)
            catalog->relationship_vars_.emplace(rv.owner, id);
        else if (rv.kind == VarKind::entity_attribute)
            catalog->one_atts_[rv.owner].push_back(id);
        else
            catalog->two_atts_[rv.owner].push_back(id);
    }
    return catalog;
}

std::shared_ptr<const VariableCatalog> VariableCatalog::build(const Schema &schema) {
    auto built = from_variables(derive_random_variables(schema));
    auto catalog = std::const_pointer_cast<VariableCatalog>(built);

    // Guarantee lookups succeed for variables and relationships without attributes.
    for (const auto &fo_var : schema.first_order_variables())
        catalog->one_atts_.try_emplace(fo_var);
    for (const auto &rel : schema.relationships())
        catalog->two_atts_.try_emplace(rel.name);

    return catalog;
}

VarId VariableCatalog::id_of(const std::string &name) const {
    auto it = index_.find(name);
    if (it == index_.end())
        throw SchemaError("unknown random variable '" + name + "'");
    return it->second;
}

ValueIndex VariableCatalog::value_index(VarId id, const std::string &value) const {
    const auto &values = value_index_[id];
    auto it = values.find(value);
    if (it == values.end())
        throw DataError("value '" + value + "' outside the declared domain of '" +
                        variables_[id].name + "'");
    return it->second;
}

ValueIndex VariableCatalog::na_index(VarId id) const {
    const auto &rv = variables_[id];
    if (rv.kind != VarKind::relationship_attribute)
        throw SchemaError("variable '" + rv.name + "' has no n/a value");
    return static_cast<ValueIndex>(rv.domain.size() - 1);
}

VarId VariableCatalog::relationship_variable(const std::string &relationship_name) const {
    auto it = relationship_vars_.find(relationship_name);
    if (it == relationship_vars_.end())
        throw SchemaError("unknown relationship '" + relationship_name + "'");
    return it->second;
}

const std::vector<VarId> &VariableCatalog::one_atts(const std::string &fo_variable) const {
    auto it = one_atts_.find(fo_variable);
    if (it == one_atts_.end())
        throw SchemaError("unknown first-order variable '" + fo_variable + "'");
    return it->second;
}

const std::vector<VarId> &VariableCatalog::two_atts(const std::string &relationship_name) const {
    auto it = two_atts_.find(relationship_name);
    if (it == two_atts_.end())
        throw SchemaError("unknown relationship '" + relationship_name + "'");
    return it->second;
}

}
