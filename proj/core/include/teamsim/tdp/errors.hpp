#pragma once

#include <stdexcept>
#include <string>

namespace teamsim::tdp {

class PatternError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SyntaxError : public PatternError {
public:
    SyntaxError(int line, int col, const std::string& what);
    int line() const { return line_; }
    int col() const { return col_; }

private:
    int line_;
    int col_;
};

class DuplicateName : public PatternError {
public:
    DuplicateName(std::string kind, std::string name);
    const std::string& kind() const { return kind_; }
    const std::string& name() const { return name_; }

private:
    std::string kind_;
    std::string name_;
};

class UnknownReference : public PatternError {
public:
    UnknownReference(std::string kind, std::string name);
    const std::string& kind() const { return kind_; }
    const std::string& name() const { return name_; }

private:
    std::string kind_;
    std::string name_;
};

class DuplicateTrigger : public PatternError {
public:
    DuplicateTrigger(std::string state, std::string trigger);
    const std::string& state() const { return state_; }
    const std::string& trigger() const { return trigger_; }

private:
    std::string state_;
    std::string trigger_;
};

}  // namespace teamsim::tdp
