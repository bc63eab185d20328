#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "placerec/descriptor.hpp"

namespace placerec {

// Line-delimited descriptor database: a one-line header, then one serialized
// descriptor per line. Human-diffable and append-friendly.
class DescriptorDB {
  public:
    struct Entry {
        SceneDescriptor descriptor;  // label lives inside the descriptor
    };

    std::vector<Entry> entries;
    int format_version = 1;

    static constexpr const char* kHeader = "placerec-db 1";
};

// Parse a database file. Any malformed record fails the whole load, naming
// the line number (fail-fast; no partial db).
DescriptorDB db_load(const std::filesystem::path& path);

// Atomic persist: write a temp file in the same directory, then rename.
void db_save(const DescriptorDB& db, const std::filesystem::path& path);

// Append a labeled descriptor and persist; on failure the file on disk is
// unchanged. Returns the updated db.
DescriptorDB db_add(DescriptorDB db, const std::string& label, SceneDescriptor descriptor,
                    const std::filesystem::path& path);

// Test seam: invoked between the temp write and the rename in db_save.
// Throwing from here must leave the previous file intact.
std::function<void()>& db_save_fault_hook();

}  // namespace placerec
