#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <stdexcept>

namespace groupsleuth {

/// Binary container of named f32 tensors. Layout: magic "GSCKPT1", u32 record
/// count, then per record: u32 name length, name bytes, u32 rows, u32 cols,
/// rows*cols little-endian f32 values.
struct Checkpoint {
    struct Record {
        std::string name;
        std::uint32_t rows = 0, cols = 0;
        std::vector<float> values;
    };
    std::vector<Record> records;

    static constexpr const char* kMagic = "GSCKPT1";

    void add(const std::string& name, std::uint32_t rows, std::uint32_t cols,
             std::vector<float> values) {
        if (values.size() != std::size_t(rows) * cols)
            throw std::runtime_error("checkpoint: record length mismatch for " + name);
        if (find(name)) throw std::runtime_error("checkpoint: duplicate tensor " + name);
        records.push_back({name, rows, cols, std::move(values)});
    }

    const Record* find(const std::string& name) const {
        for (const auto& r : records)
            if (r.name == name) return &r;
        return nullptr;
    }

    const Record& get(const std::string& name) const {
        const Record* r = find(name);
        if (!r) throw std::runtime_error("checkpoint missing tensor \"" + name + "\"");
        return *r;
    }

    void save(const std::string& path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write checkpoint " + path);
        f.write(kMagic, 7);
        auto w32 = [&](std::uint32_t v) { f.write(reinterpret_cast<const char*>(&v), 4); };
        w32(static_cast<std::uint32_t>(records.size()));
        for (const auto& r : records) {
            w32(static_cast<std::uint32_t>(r.name.size()));
            f.write(r.name.data(), std::streamsize(r.name.size()));
            w32(r.rows);
            w32(r.cols);
            f.write(reinterpret_cast<const char*>(r.values.data()),
                    std::streamsize(r.values.size() * sizeof(float)));
        }
        if (!f) throw std::runtime_error("short write on checkpoint " + path);
    }

    static Checkpoint load(const std::string& path) {
        std::ifstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot read checkpoint " + path);
        char magic[7];
        f.read(magic, 7);
        if (!f || std::string(magic, 7) != kMagic)
            throw std::runtime_error("bad magic in checkpoint " + path);
        auto r32 = [&]() {
            std::uint32_t v = 0;
            f.read(reinterpret_cast<char*>(&v), 4);
            return v;
        };
        Checkpoint ck;
        std::uint32_t n = r32();
        for (std::uint32_t i = 0; i < n && f; ++i) {
            Record r;
            std::uint32_t len = r32();
            r.name.resize(len);
            f.read(r.name.data(), len);
            r.rows = r32();
            r.cols = r32();
            r.values.resize(std::size_t(r.rows) * r.cols);
            f.read(reinterpret_cast<char*>(r.values.data()),
                   std::streamsize(r.values.size() * sizeof(float)));
            if (!f) throw std::runtime_error("truncated checkpoint " + path);
            ck.records.push_back(std::move(r));
        }
        if (ck.records.size() != n) throw std::runtime_error("truncated checkpoint " + path);
        return ck;
    }
};

/// Serializes every parameter a model exposes through visit().
template <typename Model>
void checkpoint_put(Checkpoint& ck, const std::string& prefix, Model& model) {
    model.visit(prefix, [&](const std::string& name, std::vector<float>& v,
                            std::size_t rows, std::size_t cols) {
        ck.add(name, std::uint32_t(rows), std::uint32_t(cols), v);
    });
}

template <typename Model>
void checkpoint_get(const Checkpoint& ck, const std::string& prefix, Model& model) {
    model.visit(prefix, [&](const std::string& name, std::vector<float>& v,
                            std::size_t rows, std::size_t cols) {
        const auto& rec = ck.get(name);
        if (rec.rows != rows || rec.cols != cols)
            throw std::runtime_error("checkpoint shape mismatch for " + name);
        v = rec.values;
    });
}

}  // namespace groupsleuth
