#pragma once

#include "gasrepair/lang/ast.hpp"

#include <map>
#include <optional>
#include <string>

namespace gasrepair {

enum class Status : uint8_t { Success, RequireFailed, OutOfGas };

const char* statusName(Status s);
std::optional<Status> statusFromName(const std::string& s);

std::string addrToString(const U256& a);

struct CallTuple {
    U256 caller = 0;
    U256 value = 0;
    std::string function;
    std::vector<U256> args;
};

// Partial view of the world: only the accounts and storage slots a
// transaction touched. Slot keys are canonical ("name" or "name[0x..]").
struct AccountSlice {
    U256 balance = 0;
    std::map<std::string, U256> storage;
};

struct StateSlice {
    std::map<U256, AccountSlice> accounts;
};

struct TransactionRecord {
    StateSlice preState;
    CallTuple call;
    StateSlice postState;
    std::optional<U256> returnValue;
    Status status = Status::Success;
};

struct TestCase : TransactionRecord {
    std::string id;
    std::string source; // reference to the originating transaction
};

} // namespace gasrepair
