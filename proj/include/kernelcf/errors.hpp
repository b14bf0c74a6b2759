#ifndef KERNELCF_ERRORS_HPP
#define KERNELCF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace kernelcf {

// Ratings file could not be read at all.
class IngestError : public std::runtime_error {
public:
    explicit IngestError(const std::string& msg) : std::runtime_error(msg) {}
};

// Unknown user or item id.
class LookupError : public std::runtime_error {
public:
    explicit LookupError(const std::string& msg) : std::runtime_error(msg) {}
};

// Similarity is undefined for the given profiles (e.g. zero norm).
class UndefinedSimilarityError : public std::runtime_error {
public:
    explicit UndefinedSimilarityError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-positive similarity has no finite inverse distance.
class NoDistanceError : public std::runtime_error {
public:
    explicit NoDistanceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Too few points for the requested estimate.
class InsufficientDataError : public std::runtime_error {
public:
    explicit InsufficientDataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Least-squares design matrix is rank deficient.
class FitError : public std::runtime_error {
public:
    explicit FitError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace kernelcf

#endif
