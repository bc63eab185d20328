#include "placerec/store.hpp"

#include <fstream>
#include <system_error>

namespace placerec {

namespace fs = std::filesystem;

DescriptorDB db_load(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open database: " + path.string());
    std::string line;
    if (!std::getline(is, line)) throw ParseError("database is empty (missing header)");
    if (line != DescriptorDB::kHeader)
        throw ParseError("bad database header: '" + line + "' (expected '" +
                         DescriptorDB::kHeader + "')");
    DescriptorDB db;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            db.entries.push_back({deserialize(line)});
        } catch (const ParseError& e) {
            throw ParseError("database " + path.string() + " line " + std::to_string(lineno) +
                             ": " + e.what());
        }
    }
    return db;
}

std::function<void()>& db_save_fault_hook() {
    static std::function<void()> hook;
    return hook;
}

void db_save(const DescriptorDB& db, const fs::path& path) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp);
        if (!os) throw Error("cannot open for writing: " + tmp.string());
        os << DescriptorDB::kHeader << "\n";
        for (const auto& e : db.entries) os << serialize(e.descriptor) << "\n";
        os.flush();
        if (!os) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw Error("write failed: " + tmp.string());
        }
    }
    if (db_save_fault_hook()) db_save_fault_hook()();
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error("rename failed while persisting " + path.string());
    }
}

DescriptorDB db_add(DescriptorDB db, const std::string& label, SceneDescriptor descriptor,
                    const fs::path& path) {
    descriptor.label = label;
    db.entries.push_back({std::move(descriptor)});
    db_save(db, path);
    return db;
}

}  // namespace placerec
