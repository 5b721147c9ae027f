#pragma once

#include "relct/ct.hpp"
#include "relct/database.hpp"
#include "relct/lattice.hpp"

namespace relct {

struct OracleOptions {
    std::uint64_t cap = 10'000'000; ///< refuse enumerations larger than this
    int jobs = 1;                   ///< worker threads over instantiation blocks
};

/** Ground-truth contingency table for a chain: enumerates the full entity cross product over the
 * chain's first-order variables and tallies every instantiation.  Deliberately brute force; the
 * cap guards against runaway enumerations.
 *
 * With jobs > 1 the instantiation space is split into blocks counted by OpenMP workers whose
 * partial tallies are merged; the result is identical to the serial reference. */
ContingencyTable oracle_ct(const DatabaseInstance &db, const CatalogPtr &catalog,
                           const RelationshipChain &chain, const OracleOptions &options = {});

/** Serial reference implementation, kept as the baseline the parallel kernel is tested against. */
ContingencyTable oracle_ct_serial(const DatabaseInstance &db, const CatalogPtr &catalog,
                                  const RelationshipChain &chain, std::uint64_t cap = 10'000'000);

/** Ground truth for a level-0 entity node. */
ContingencyTable oracle_entity_ct(const DatabaseInstance &db, const CatalogPtr &catalog,
                                  const std::string &fo_variable);

/** Cross-product tuple count divided by the table's row count.  Defined as 1.0 when both are
 * zero; an empty table against a non-empty cross product is a division by zero. */
double compression_ratio(const DatabaseInstance &db, const RelationshipChain &chain,
                         const ContingencyTable &ct);

}
