#include "relct/lattice.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace relct {

namespace {

bool shares_variable(const Schema &schema, const std::string &relationship,
                     const std::set<std::string> &variables) {
    for (const auto &var : schema.variables_of(relationship))
        if (variables.contains(var))
            return true;
    return false;
}

}

RelationshipChain RelationshipChain::ordered(const Schema &schema,
                                             std::vector<std::string> relationships) {
    if (relationships.empty())
        throw SchemaError("a relationship chain cannot be empty");
    std::set<std::string> seen_rels;
    std::set<std::string> covered;
    for (std::size_t i = 0; i < relationships.size(); ++i) {
        const auto &name = relationships[i];
        if (!seen_rels.insert(name).second)
            throw SchemaError("relationship '" + name + "' repeated in chain");
        if (i > 0 && !shares_variable(schema, name, covered))
            throw SchemaError("relationship '" + name +
                              "' shares no first-order variable with its chain predecessors");
        for (const auto &var : schema.variables_of(name))
            covered.insert(var);
    }
    return RelationshipChain(std::move(relationships));
}

std::optional<RelationshipChain>
RelationshipChain::from_set(const Schema &schema, std::vector<std::string> relationship_set) {
    std::sort(relationship_set.begin(), relationship_set.end());

    // Greedy: repeatedly append the smallest remaining relationship adjacent to the prefix.  For
    // a connected set this yields the lexicographically smallest valid ordering.
    std::vector<std::string> order;
    std::set<std::string> covered;
    std::vector<bool> used(relationship_set.size(), false);
    for (std::size_t step = 0; step < relationship_set.size(); ++step) {
        bool extended = false;
        for (std::size_t i = 0; i < relationship_set.size(); ++i) {
            if (used[i])
                continue;
            if (!order.empty() && !shares_variable(schema, relationship_set[i], covered))
                continue;
            used[i] = true;
            order.push_back(relationship_set[i]);
            for (const auto &var : schema.variables_of(relationship_set[i]))
                covered.insert(var);
            extended = true;
            break;
        }
        if (!extended)
            return std::nullopt; // disconnected set
    }
    return RelationshipChain(std::move(order));
}

std::string RelationshipChain::key() const {
    return key_of(relationships_);
}

std::string RelationshipChain::key_of(std::span<const std::string> relationship_set) {
    std::vector<std::string> sorted(relationship_set.begin(), relationship_set.end());
    std::sort(sorted.begin(), sorted.end());
    std::string key;
    for (const auto &name : sorted) {
        if (!key.empty())
            key += ',';
        key += name;
    }
    return key;
}

std::vector<std::string> RelationshipChain::first_order_variables(const Schema &schema) const {
    std::set<std::string> vars;
    for (const auto &rel : relationships_)
        for (const auto &var : schema.variables_of(rel))
            vars.insert(var);
    return {vars.begin(), vars.end()};
}

const std::vector<RelationshipChain> &ChainLattice::level(std::size_t level) const {
    if (level == 0 || level > levels_.size())
        throw SchemaError("lattice has no level " + std::to_string(level));
    return levels_[level - 1];
}

std::vector<RelationshipChain> ChainLattice::all_chains() const {
    std::vector<RelationshipChain> chains;
    for (const auto &level : levels_)
        chains.insert(chains.end(), level.begin(), level.end());
    return chains;
}

std::size_t ChainLattice::chain_count() const {
    std::size_t n = 0;
    for (const auto &level : levels_)
        n += level.size();
    return n;
}

const RelationshipChain *ChainLattice::find(std::span<const std::string> relationship_set) const {
    auto it = by_key_.find(RelationshipChain::key_of(relationship_set));
    if (it == by_key_.end())
        return nullptr;
    return &levels_[it->second.first][it->second.second];
}

std::vector<std::string> ChainLattice::sub_chain_keys(const RelationshipChain &chain) const {
    std::vector<std::string> keys;
    if (chain.length() < 2)
        return keys;
    for (std::size_t drop = 0; drop < chain.length(); ++drop) {
        std::vector<std::string> rest;
        for (std::size_t i = 0; i < chain.length(); ++i)
            if (i != drop)
                rest.push_back(chain.relationships()[i]);
        if (find(rest) != nullptr)
            keys.push_back(RelationshipChain::key_of(rest));
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    return keys;
}

ChainLattice enumerate_chain_lattice(const Schema &schema, std::size_t max_length) {
    if (max_length < 1)
        throw SchemaError("max_length must be at least 1");

    ChainLattice lattice;
    lattice.schema_ = &schema;
    lattice.entity_nodes_ = schema.first_order_variables();

    const std::size_t m = schema.relationships().size();
    const std::size_t top = std::min(max_length, m);

    // Levelwise extension: connected ℓ-sets grow by one adjacent relationship.
    std::map<std::string, std::vector<std::string>> frontier; // key -> sorted set
    for (const auto &rel : schema.relationships())
        frontier.emplace(rel.name, std::vector<std::string>{rel.name});

    for (std::size_t length = 1; length <= top && !frontier.empty(); ++length) {
        std::vector<RelationshipChain> level;
        for (const auto &[key, set] : frontier) {
            auto chain = RelationshipChain::from_set(schema, set);
            if (chain)
                level.push_back(std::move(*chain));
        }
        std::sort(level.begin(), level.end(),
                  [](const RelationshipChain &a, const RelationshipChain &b) {
                      return a.relationships() < b.relationships();
                  });
        for (std::size_t i = 0; i < level.size(); ++i)
            lattice.by_key_.emplace(level[i].key(), std::make_pair(length - 1, i));
        lattice.levels_.push_back(std::move(level));

        if (length == top)
            break;
        std::map<std::string, std::vector<std::string>> next;
        for (const auto &[key, set] : frontier) {
            std::set<std::string> covered;
            for (const auto &rel : set)
                for (const auto &var : schema.variables_of(rel))
                    covered.insert(var);
            for (const auto &rel : schema.relationships()) {
                if (std::find(set.begin(), set.end(), rel.name) != set.end())
                    continue;
                if (!shares_variable(schema, rel.name, covered))
                    continue;
                auto grown = set;
                grown.push_back(rel.name);
                std::sort(grown.begin(), grown.end());
                next.emplace(RelationshipChain::key_of(grown), std::move(grown));
            }
        }
        frontier = std::move(next);
    }

    return lattice;
}

}
