#pragma once

#include <stdexcept>
#include <string>

namespace relct {

/** Schema file or schema invariant violation. */
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/** Data ingestion violation: malformed CSV, dangling key, value outside a declared domain. */
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/** Contingency-table algebra contract violation: column mismatch, undefined subtraction, count overflow. */
struct AlgebraError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/** Enumeration refused because the entity cross product exceeds the configured cap. */
struct CapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}
