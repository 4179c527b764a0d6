#pragma once

#include <optional>

#include "sketchls/linalg.hpp"

namespace sketchls {

/// Response, regressors and optional instruments sharing n rows.
struct DataBundle {
    Vector y;
    Matrix x;
    std::optional<Matrix> z;

    std::size_t n() const { return static_cast<std::size_t>(y.size()); }
    std::size_t p() const { return static_cast<std::size_t>(x.cols()); }
    std::size_t q() const { return z ? static_cast<std::size_t>(z->cols()) : 0; }

    /// Shared row count; q >= p when instruments are present.
    void validate() const;
};

} // namespace sketchls
