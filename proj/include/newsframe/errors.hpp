#pragma once

#include <stdexcept>
#include <string>

namespace newsframe {

/// Malformed or inconsistent input data (corpus files, lexicons, images).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid combination of options or arguments.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Failure while training or evaluating a model.
class TrainingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace newsframe
