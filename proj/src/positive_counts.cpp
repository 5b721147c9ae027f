#include "relct/positive_counts.hpp"

#include <algorithm>
#include <set>

namespace relct {

namespace {

// 1Att variable ids of `fo_var`, aligned with the population's declared attribute order.
std::vector<VarId> declared_one_atts(const Schema &schema, const VariableCatalog &catalog,
                                     const std::string &fo_var) {
    const auto &pop = schema.population(schema.population_of_variable(fo_var));
    std::vector<VarId> vars;
    vars.reserve(pop.attributes.size());
    for (const auto &attr : pop.attributes)
        vars.push_back(catalog.id_of(qualified_name(attr.name, fo_var)));
    return vars;
}

std::vector<VarId> declared_two_atts(const RelationshipDecl &rel, const VariableCatalog &catalog) {
    std::vector<VarId> vars;
    vars.reserve(rel.attributes.size());
    for (const auto &attr : rel.attributes)
        vars.push_back(catalog.id_of(
            qualified_name(attr.name, rel.slots[0].variable, rel.slots[1].variable)));
    return vars;
}

}

ContingencyTable entity_ct(const DatabaseInstance &db, const CatalogPtr &catalog,
                           const std::string &fo_variable) {
    const auto &schema = db.schema();
    const auto &table = db.entities(schema.population_of_variable(fo_variable));
    auto att_vars = declared_one_atts(schema, *catalog, fo_variable);

    ContingencyTable ct(catalog, att_vars);
    std::vector<std::size_t> pos(att_vars.size());
    for (std::size_t i = 0; i < att_vars.size(); ++i)
        pos[i] = *ct.column_position(att_vars[i]);

    Row row(att_vars.size());
    for (const auto &record : table.attribute_rows) {
        for (std::size_t i = 0; i < att_vars.size(); ++i)
            row[pos[i]] = record[i];
        ct.add_row(row, 1);
    }
    db.note_tuple_accesses(table.size());
    ct.provenance = "entity ct(" + fo_variable + ")";
    return ct;
}

/*----------------------------------------------------------------------------------------------
 * Chain join
 *--------------------------------------------------------------------------------------------*/

namespace {

// State rows mix entity ids and attribute values; both fit in 32 bits.
using StateKey = std::vector<std::uint32_t>;

struct StateKeyHash {
    std::size_t operator()(const StateKey &key) const {
        std::size_t h = 0xcbf29ce484222325ULL;
        for (std::uint32_t v : key) {
            h ^= v;
            h *= 0x100000001b3ULL;
        }
        return h;
    }
};

using StateMap = std::unordered_map<StateKey, Count, StateKeyHash>;

struct JoinState {
    std::vector<std::string> live_vars; ///< id slots, in key order
    std::vector<VarId> att_vars;        ///< value slots, after the ids
    StateMap rows;

    std::size_t id_width() const { return live_vars.size(); }
};

// Drops the ids of variables outside `needed`, merging rows that become equal.
void retire_variables(JoinState &state, const std::set<std::string> &needed) {
    std::vector<std::size_t> keep;
    std::vector<std::string> kept_vars;
    for (std::size_t i = 0; i < state.live_vars.size(); ++i) {
        if (needed.contains(state.live_vars[i])) {
            keep.push_back(i);
            kept_vars.push_back(state.live_vars[i]);
        }
    }
    if (keep.size() == state.live_vars.size())
        return;

    StateMap merged;
    merged.reserve(state.rows.size());
    StateKey key;
    for (const auto &[row, count] : state.rows) {
        key.clear();
        for (std::size_t i : keep)
            key.push_back(row[i]);
        key.insert(key.end(), row.begin() + state.id_width(), row.end());
        auto [it, inserted] = merged.try_emplace(key, count);
        if (!inserted)
            it->second = checked_add(it->second, count);
    }
    state.live_vars = std::move(kept_vars);
    state.rows = std::move(merged);
}

}

ContingencyTable positive_chain_ct(const DatabaseInstance &db, const CatalogPtr &catalog,
                                   const RelationshipChain &chain) {
    const auto &schema = db.schema();
    const auto &rels = chain.relationships();

    // Variables still needed by later relationships, per step.
    std::vector<std::set<std::string>> needed_after(rels.size());
    for (std::size_t k = rels.size(); k-- > 1;) {
        needed_after[k - 1] = needed_after[k];
        for (const auto &var : schema.variables_of(rels[k]))
            needed_after[k - 1].insert(var);
    }

    JoinState state;
    auto introduce = [&](const std::string &var) {
        state.live_vars.push_back(var);
        for (VarId att : declared_one_atts(schema, *catalog, var))
            state.att_vars.push_back(att);
    };

    for (std::size_t k = 0; k < rels.size(); ++k) {
        const auto &rel = schema.relationship(rels[k]);
        const auto &tuples = db.tuples(rels[k]).tuples;
        const std::string &u = rel.slots[0].variable;
        const std::string &v = rel.slots[1].variable;
        auto two_atts = declared_two_atts(rel, *catalog);
        db.note_tuple_accesses(tuples.size());

        if (k == 0) {
            introduce(u);
            const auto &u_records = db.entities(rel.slots[0].population).attribute_rows;
            introduce(v);
            const auto &v_records = db.entities(rel.slots[1].population).attribute_rows;
            for (VarId att : two_atts)
                state.att_vars.push_back(att);

            StateKey key;
            for (const auto &tuple : tuples) {
                key.clear();
                key.push_back(tuple.first);
                key.push_back(tuple.second);
                for (ValueIndex value : u_records[tuple.first])
                    key.push_back(value);
                for (ValueIndex value : v_records[tuple.second])
                    key.push_back(value);
                for (ValueIndex value : tuple.attribute_values)
                    key.push_back(value);
                state.rows.try_emplace(key, 1); // key pairs are unique
            }
            db.note_tuple_accesses(2 * tuples.size());
        } else {
            // Positions of the relationship's variables in the current state, if live.
            auto live_pos = [&state](const std::string &var) -> std::int64_t {
                auto it = std::find(state.live_vars.begin(), state.live_vars.end(), var);
                return it == state.live_vars.end()
                           ? -1
                           : std::int64_t(it - state.live_vars.begin());
            };
            std::int64_t u_pos = live_pos(u);
            std::int64_t v_pos = live_pos(v);
            if (u_pos < 0 && v_pos < 0)
                throw SchemaError("relationship '" + rels[k] +
                                  "' shares no first-order variable with its chain predecessors");

            // Index the relationship's tuples by the shared slots.
            std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> index;
            for (std::uint32_t t = 0; t < tuples.size(); ++t) {
                std::uint64_t key = 0;
                if (u_pos >= 0 && v_pos >= 0)
                    key = RelationshipTable::pair_key(tuples[t].first, tuples[t].second);
                else if (u_pos >= 0)
                    key = tuples[t].first;
                else
                    key = tuples[t].second;
                index[key].push_back(t);
            }

            const std::string fresh_var = u_pos >= 0 && v_pos >= 0 ? "" : (u_pos >= 0 ? v : u);
            const std::vector<std::vector<ValueIndex>> *fresh_records = nullptr;
            if (!fresh_var.empty()) {
                const auto &slot = u_pos >= 0 ? rel.slots[1] : rel.slots[0];
                fresh_records = &db.entities(slot.population).attribute_rows;
            }

            JoinState next;
            next.live_vars = state.live_vars;
            next.att_vars = state.att_vars;
            if (!fresh_var.empty()) {
                next.live_vars.push_back(fresh_var);
                for (VarId att : declared_one_atts(schema, *catalog, fresh_var))
                    next.att_vars.push_back(att);
            }
            for (VarId att : two_atts)
                next.att_vars.push_back(att);

            std::uint64_t fresh_reads = 0;
            StateKey key;
            for (const auto &[row, count] : state.rows) {
                std::uint64_t probe;
                if (u_pos >= 0 && v_pos >= 0)
                    probe = RelationshipTable::pair_key(row[u_pos], row[v_pos]);
                else
                    probe = u_pos >= 0 ? row[u_pos] : row[v_pos];
                auto hit = index.find(probe);
                if (hit == index.end())
                    continue;
                for (std::uint32_t t : hit->second) {
                    const auto &tuple = tuples[t];
                    key.assign(row.begin(), row.begin() + state.id_width());
                    if (!fresh_var.empty()) {
                        key.push_back(u_pos >= 0 ? tuple.second : tuple.first);
                        ++fresh_reads;
                    }
                    key.insert(key.end(), row.begin() + state.id_width(), row.end());
                    if (!fresh_var.empty())
                        for (ValueIndex value : (*fresh_records)[u_pos >= 0 ? tuple.second
                                                                            : tuple.first])
                            key.push_back(value);
                    for (ValueIndex value : tuple.attribute_values)
                        key.push_back(value);
                    auto [it, inserted] = next.rows.try_emplace(key, count);
                    if (!inserted)
                        it->second = checked_add(it->second, count);
                }
            }
            db.note_tuple_accesses(fresh_reads);
            state = std::move(next);
        }

        retire_variables(state, needed_after[k]);
    }

    // All ids retired; rows are keyed by attribute values alone.
    ContingencyTable ct(catalog, state.att_vars);
    std::vector<std::size_t> pos(state.att_vars.size());
    for (std::size_t i = 0; i < state.att_vars.size(); ++i)
        pos[i] = *ct.column_position(state.att_vars[i]);

    Row row(state.att_vars.size());
    for (const auto &[key, count] : state.rows) {
        for (std::size_t i = 0; i < pos.size(); ++i)
            row[pos[i]] = static_cast<ValueIndex>(key[i]);
        ct.add_row(row, count);
    }
    ct.provenance = "positive counts for chain " + chain.key();
    return ct;
}

}
