#pragma once

#include "relct/ct.hpp"
#include "relct/database.hpp"
#include "relct/lattice.hpp"

namespace relct {

/** ct(1Atts(X)): one row per attribute combination, counts = entities, total = population size. */
ContingencyTable entity_ct(const DatabaseInstance &db, const CatalogPtr &catalog,
                           const std::string &fo_variable);

/** ct(1Atts(chain) ∪ 2Atts(chain) | all chain relationships true): the group-by of the natural
 * join of the chain's tables, computed by a hash join that accumulates counts directly. */
ContingencyTable positive_chain_ct(const DatabaseInstance &db, const CatalogPtr &catalog,
                                   const RelationshipChain &chain);

}
