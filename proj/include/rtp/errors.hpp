#pragma once

#include <stdexcept>
#include <string>

namespace rtp {

// Raised when a model is evaluated outside its domain (non-positive price,
// supply inversion below the intercept, ...).
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class calibration_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class fit_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class controller_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class analysis_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input files: carries the 1-based row number when known.
class ingestion_error : public std::runtime_error {
public:
    ingestion_error(const std::string& what, long row = -1)
        : std::runtime_error(row >= 0 ? what + " (row " + std::to_string(row) + ")" : what),
          row_(row) {}
    long row() const { return row_; }

private:
    long row_;
};

// User-facing configuration problems; the CLI maps these to exit code 2.
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rtp
