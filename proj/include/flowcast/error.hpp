#ifndef FLOWCAST_ERROR_HPP
#define FLOWCAST_ERROR_HPP

#include <stdexcept>
#include <string>

namespace flowcast {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SeriesTooShort : public Error {
public:
    using Error::Error;
};

class InsufficientExtrema : public Error {
public:
    using Error::Error;
};

class MissingColumn : public Error {
public:
    using Error::Error;
};

class NonUniformInterval : public Error {
public:
    using Error::Error;
};

class EmptyFile : public Error {
public:
    using Error::Error;
};

class HorizonTooLong : public Error {
public:
    using Error::Error;
};

class ShapeMismatch : public Error {
public:
    using Error::Error;
};

class DivergedTraining : public Error {
public:
    DivergedTraining(const std::string& what, int epoch)
        : Error(what), epoch_(epoch) {}
    int epoch() const { return epoch_; }

private:
    int epoch_;
};

class EmptyInput : public Error {
public:
    using Error::Error;
};

class InsufficientRuns : public Error {
public:
    using Error::Error;
};

class InvalidConfig : public Error {
public:
    using Error::Error;
};

class IoFailure : public Error {
public:
    using Error::Error;
};

}  // namespace flowcast

#endif  // FLOWCAST_ERROR_HPP
