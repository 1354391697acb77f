#pragma once

#include <stdexcept>
#include <string>

namespace flexgrid {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad value passed to a math operation (outside its stated domain).
struct DomainError : Error {
    using Error::Error;
};

// Malformed input file; the message carries the byte offset where known.
struct ParseError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

struct IndexOutOfRange : Error {
    using Error::Error;
};

struct UnknownProduct : Error {
    using Error::Error;
};

struct EmptyWindow : Error {
    using Error::Error;
};

struct MissingAnswers : Error {
    explicit MissingAnswers(const std::string& asset_id)
        : Error("no audit answers for asset '" + asset_id + "'"), asset_id(asset_id) {}
    std::string asset_id;
};

struct MissingEstimate : Error {
    MissingEstimate(const std::string& asset_id, const std::string& field)
        : Error("asset '" + asset_id + "': no estimate or default for '" + field + "'"),
          asset_id(asset_id), field(field) {}
    std::string asset_id;
    std::string field;
};

struct MissingAsset : Error {
    explicit MissingAsset(const std::string& asset_id)
        : Error("stack references unknown asset '" + asset_id + "'"), asset_id(asset_id) {}
    std::string asset_id;
};

struct ProbabilityMass : Error {
    using Error::Error;
};

// Simplex pivoting stalled beyond the iteration cap.
struct NumericalBreakdown : Error {
    using Error::Error;
};

struct TooManyBinaries : Error {
    using Error::Error;
};

}  // namespace flexgrid
