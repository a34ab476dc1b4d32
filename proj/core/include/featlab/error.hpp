#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace featlab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error { using Error::Error; };
class EmptyTableError : public Error { using Error::Error; };
class ParameterError : public Error { using Error::Error; };
class ShapeError : public Error { using Error::Error; };
class IndexError : public Error { using Error::Error; };
class CapacityError : public Error { using Error::Error; };
class RecipeError : public Error { using Error::Error; };
class UndefinedSimilarityError : public Error { using Error::Error; };
class EmptySetError : public Error { using Error::Error; };
class IoError : public Error { using Error::Error; };

/// Non-finite or exploding logits during gradient descent.
class DivergenceError : public Error {
public:
    DivergenceError(std::size_t iteration, const std::string& what)
        : Error("diverged at iteration " + std::to_string(iteration) + ": " + what),
          iteration_(iteration) {}

    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

/// Invalid experiment configuration; carries the offending field name.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& what)
        : Error("config field '" + field + "': " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace featlab
