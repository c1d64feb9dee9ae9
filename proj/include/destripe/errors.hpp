#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace destripe {

    /// Base of every error thrown by the library.
    class Error : public std::runtime_error {
    public:
        using std::runtime_error::runtime_error;
    };

    class InvalidInputError : public Error {
    public:
        using Error::Error;
    };

    class ShapeError : public Error {
    public:
        using Error::Error;
    };

    /// Spectrum handed to the inverse transform is not conjugate-symmetric.
    class SymmetryError : public Error {
    public:
        using Error::Error;
    };

    /// Quantity is undefined for this input (zero denominator, zero energy).
    class DegenerateError : public Error {
    public:
        using Error::Error;
    };

    class DivergenceError : public Error {
    public:
        DivergenceError(std::size_t iteration, const std::string& what)
            : Error(what), iteration_(iteration) {}

        [[nodiscard]] std::size_t iteration() const noexcept { return iteration_; }

    private:
        std::size_t iteration_;
    };

    class IoError : public Error {
    public:
        using Error::Error;
    };

    class UnsupportedFormatError : public IoError {
    public:
        using IoError::IoError;
    };

    class CorruptFileError : public IoError {
    public:
        using IoError::IoError;
    };

} // namespace destripe
