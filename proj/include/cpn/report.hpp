#pragma once

#include <string>
#include <vector>

namespace cpn {

enum class Status { Pass, Fail, Inconclusive };

inline const char* to_string(Status s)
{
    switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Inconclusive: return "inconclusive";
    }
    return "?";
}

/// One checked condition. `id` is a stable dotted identifier such as
/// "morphism.continuity"; `detail` explains a failure or a computed value.
struct Clause {
    std::string id;
    std::string description;
    Status status = Status::Pass;
    std::string detail;
};

class Report {
public:
    Report() = default;
    explicit Report(std::string subject) : subject_(std::move(subject)) {}

    const std::string& subject() const { return subject_; }
    const std::vector<Clause>& clauses() const { return clauses_; }

    Clause& add(std::string id, std::string description, Status status, std::string detail = {})
    {
        clauses_.push_back({std::move(id), std::move(description), status, std::move(detail)});
        return clauses_.back();
    }
    Clause& pass(std::string id, std::string description, std::string detail = {})
    {
        return add(std::move(id), std::move(description), Status::Pass, std::move(detail));
    }
    Clause& fail(std::string id, std::string description, std::string detail)
    {
        return add(std::move(id), std::move(description), Status::Fail, std::move(detail));
    }
    void append(const Report& other)
    {
        clauses_.insert(clauses_.end(), other.clauses_.begin(), other.clauses_.end());
    }

    Status status() const
    {
        Status s = Status::Pass;
        for (const auto& c : clauses_) {
            if (c.status == Status::Fail)
                return Status::Fail;
            if (c.status == Status::Inconclusive)
                s = Status::Inconclusive;
        }
        return s;
    }
    bool passed() const { return status() == Status::Pass; }
    /// First failing (or, failing none, first inconclusive) clause; null when passed.
    const Clause* first_problem() const
    {
        for (const auto& c : clauses_)
            if (c.status == Status::Fail)
                return &c;
        for (const auto& c : clauses_)
            if (c.status == Status::Inconclusive)
                return &c;
        return nullptr;
    }

private:
    std::string subject_;
    std::vector<Clause> clauses_;
};

} // namespace cpn
