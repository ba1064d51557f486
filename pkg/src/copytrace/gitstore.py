"""Read-only access to git object databases.

Parses loose objects and version-2 packfiles (with idx v2) into typed
objects.  Delta chains (OFS_DELTA / REF_DELTA) are resolved recursively with
a bounded depth.  Stores are immutable after open and safe for concurrent
readers; the only shared mutable state is a lock-protected bounded cache.
"""

from __future__ import annotations

import hashlib
import mmap
import os
import struct
import threading
import zlib
from dataclasses import dataclass
from pathlib import Path

from .errors import (
    CorruptIndex,
    CorruptObject,
    CorruptTree,
    DeltaBaseMissing,
    DeltaDepthExceeded,
    MalformedCommitHeader,
    NotAGitRepository,
    ObjectNotFound,
    UnsupportedPackVersion,
)

_HEX = set("0123456789abcdef")

# packfile object type codes
_OBJ_COMMIT = 1
_OBJ_TREE = 2
_OBJ_BLOB = 3
_OBJ_TAG = 4
_OBJ_OFS_DELTA = 6
_OBJ_REF_DELTA = 7

_TYPE_NAMES = {_OBJ_COMMIT: "commit", _OBJ_TREE: "tree", _OBJ_BLOB: "blob", _OBJ_TAG: "tag"}

MAX_DELTA_DEPTH = 4096

# mode prefix for submodule (gitlink) tree entries
_GITLINK_MODE = 0o160000


@dataclass(frozen=True, order=True)
class ObjectId:
    """20-byte SHA-1 identity of a git object."""

    raw: bytes

    def __post_init__(self):
        if len(self.raw) != 20:
            raise ValueError(f"object id must be 20 bytes, got {len(self.raw)}")

    @property
    def hex(self) -> str:
        return self.raw.hex()

    @classmethod
    def from_hex(cls, hx: str) -> "ObjectId":
        if len(hx) != 40 or not set(hx) <= _HEX:
            raise ValueError(f"not a 40-char lowercase hex id: {hx!r}")
        return cls(bytes.fromhex(hx))

    def __repr__(self):
        return f"ObjectId({self.hex})"


@dataclass(frozen=True)
class GitObject:
    """A fully materialized git object."""

    kind: str  # commit | tree | blob | tag
    payload: bytes

    @property
    def size(self) -> int:
        return len(self.payload)

    def id(self) -> ObjectId:
        return hash_object(self.kind, self.payload)


@dataclass(frozen=True)
class TreeEntry:
    mode: int
    name: bytes
    id: ObjectId

    @property
    def is_tree(self) -> bool:
        return (self.mode & 0o170000) == 0o040000

    @property
    def is_gitlink(self) -> bool:
        return (self.mode & 0o170000) == _GITLINK_MODE


@dataclass(frozen=True)
class CommitHeader:
    """Parsed commit header fields (times are raw, unsanitized)."""

    tree: ObjectId
    parents: tuple[ObjectId, ...]
    author: str
    author_time: int
    author_tz: int
    committer_time: int
    committer_tz: int


def hash_object(kind: str, payload: bytes) -> ObjectId:
    """Content id: sha1 of "<kind> <size>\\0" ++ payload."""
    h = hashlib.sha1()
    h.update(b"%s %d\x00" % (kind.encode(), len(payload)))
    h.update(payload)
    return ObjectId(h.digest())


EMPTY_BLOB_ID = hash_object("blob", b"")


class _BoundedCache:
    """Tiny thread-safe FIFO cache for delta bases."""

    def __init__(self, capacity: int):
        self.capacity = capacity
        self._data: dict = {}
        self._lock = threading.Lock()

    def get(self, key):
        with self._lock:
            return self._data.get(key)

    def put(self, key, value):
        if self.capacity <= 0:
            return
        with self._lock:
            if key in self._data:
                return
            while len(self._data) >= self.capacity:
                self._data.pop(next(iter(self._data)))
            self._data[key] = value


class _PackIndex:
    """Parsed *.idx (version 2) for one packfile."""

    def __init__(self, path: Path):
        data = path.read_bytes()
        if len(data) < 1024 + 40 or data[:4] != b"\xfftOc":
            raise UnsupportedPackVersion(f"{path}: not a v2 pack index")
        version = struct.unpack(">I", data[4:8])[0]
        if version != 2:
            raise UnsupportedPackVersion(f"{path}: idx version {version}, only 2 supported")
        if hashlib.sha1(data[:-20]).digest() != data[-20:]:
            raise CorruptIndex(f"{path}: idx checksum mismatch")
        fanout = struct.unpack(">256I", data[8 : 8 + 1024])
        n = fanout[255]
        names_off = 8 + 1024
        crc_off = names_off + 20 * n
        ofs_off = crc_off + 4 * n
        large_off = ofs_off + 4 * n
        self.count = n
        self.names = data[names_off:crc_off]
        self.offsets = struct.unpack(f">{n}I", data[ofs_off:large_off])
        n_large = (len(data) - 40 - large_off) // 8
        self.large = struct.unpack(f">{n_large}Q", data[large_off : large_off + 8 * n_large])
        self.fanout = fanout
        self.pack_checksum = data[-40:-20]

    def find(self, raw: bytes) -> int | None:
        """Return the pack offset for a raw sha, or None."""
        first = raw[0]
        lo = self.fanout[first - 1] if first else 0
        hi = self.fanout[first]
        while lo < hi:
            mid = (lo + hi) // 2
            mid_name = self.names[20 * mid : 20 * mid + 20]
            if mid_name < raw:
                lo = mid + 1
            elif mid_name > raw:
                hi = mid
            else:
                return self._offset(mid)
        return None

    def _offset(self, i: int) -> int:
        o = self.offsets[i]
        if o & 0x80000000:
            return self.large[o & 0x7FFFFFFF]
        return o

    def entries(self):
        for i in range(self.count):
            yield ObjectId(self.names[20 * i : 20 * i + 20]), self._offset(i)


class _Pack:
    """One pack/idx pair, mmap'd read-only."""

    def __init__(self, pack_path: Path):
        self.path = pack_path
        self.index = _PackIndex(pack_path.with_suffix(".idx"))
        self._fh = open(pack_path, "rb")
        self.data = mmap.mmap(self._fh.fileno(), 0, access=mmap.ACCESS_READ)
        if self.data[:4] != b"PACK":
            raise UnsupportedPackVersion(f"{pack_path}: missing PACK signature")
        version = struct.unpack(">I", self.data[4:8])[0]
        if version != 2:
            raise UnsupportedPackVersion(f"{pack_path}: pack version {version}, only 2 supported")

    def read_raw(self, offset: int) -> tuple[int, bytes, int | bytes]:
        """Decode the object at a pack offset.

        Returns (type_code, data, base) where base is an absolute offset for
        OFS_DELTA, raw sha bytes for REF_DELTA, and 0 otherwise.
        """
        pos = offset
        byte = self.data[pos]
        pos += 1
        type_code = (byte >> 4) & 0x7
        size = byte & 0x0F
        shift = 4
        while byte & 0x80:
            byte = self.data[pos]
            pos += 1
            size |= (byte & 0x7F) << shift
            shift += 7
        base: int | bytes = 0
        if type_code == _OBJ_OFS_DELTA:
            byte = self.data[pos]
            pos += 1
            rel = byte & 0x7F
            while byte & 0x80:
                byte = self.data[pos]
                pos += 1
                rel = ((rel + 1) << 7) | (byte & 0x7F)
            base = offset - rel
        elif type_code == _OBJ_REF_DELTA:
            base = bytes(self.data[pos : pos + 20])
            pos += 20
        data = self._inflate(pos, size)
        return type_code, data, base

    def _inflate(self, pos: int, expected: int) -> bytes:
        d = zlib.decompressobj()
        out = []
        got = 0
        while not d.eof:
            chunk = self.data[pos : pos + 65536]
            if not chunk:
                raise CorruptObject(f"{self.path}: truncated zlib stream at {pos}")
            out.append(d.decompress(chunk))
            got += len(out[-1])
            pos += len(chunk) - len(d.unused_data)
            if d.unused_data:
                break
        data = b"".join(out)
        if len(data) != expected:
            raise CorruptObject(f"{self.path}: inflated {len(data)} bytes, header said {expected}")
        return data

    def close(self):
        self.data.close()
        self._fh.close()


def _apply_delta(base: bytes, delta: bytes) -> bytes:
    """Apply a git delta (copy/insert instruction stream) to a base."""
    pos = 0

    def varint():
        nonlocal pos
        value = 0
        shift = 0
        while True:
            byte = delta[pos]
            pos += 1
            value |= (byte & 0x7F) << shift
            shift += 7
            if not byte & 0x80:
                return value

    base_size = varint()
    if base_size != len(base):
        raise CorruptObject(f"delta base size {base_size} != actual {len(base)}")
    result_size = varint()
    out = bytearray()
    while pos < len(delta):
        instr = delta[pos]
        pos += 1
        if instr & 0x80:  # copy from base
            offset = 0
            size = 0
            for bit, shift in ((0x01, 0), (0x02, 8), (0x04, 16), (0x08, 24)):
                if instr & bit:
                    offset |= delta[pos] << shift
                    pos += 1
            for bit, shift in ((0x10, 0), (0x20, 8), (0x40, 16)):
                if instr & bit:
                    size |= delta[pos] << shift
                    pos += 1
            if size == 0:
                size = 0x10000
            if offset + size > len(base):
                raise CorruptObject("delta copy past end of base")
            out += base[offset : offset + size]
        elif instr:  # insert literal bytes
            out += delta[pos : pos + instr]
            pos += instr
        else:
            raise CorruptObject("delta instruction byte 0 is reserved")
    if len(out) != result_size:
        raise CorruptObject(f"delta produced {len(out)} bytes, expected {result_size}")
    return bytes(out)


class ObjectStore:
    """Handle over one repository's object database (loose + packs)."""

    def __init__(self, repo_path: str | os.PathLike, verify: bool = True, cache_size: int = 256):
        root = Path(repo_path)
        if (root / "objects").is_dir():
            git_dir = root
        elif (root / ".git" / "objects").is_dir():
            git_dir = root / ".git"
        else:
            raise NotAGitRepository(f"{root}: no objects/ directory found")
        self.git_dir = git_dir
        self.objects_dir = git_dir / "objects"
        pack_dir = self.objects_dir / "pack"
        if (pack_dir / "multi-pack-index").exists():
            raise UnsupportedPackVersion(f"{pack_dir}: multi-pack-index not supported")
        self.packs = [_Pack(p) for p in sorted(pack_dir.glob("*.pack"))] if pack_dir.is_dir() else []
        self.verify = verify
        self._cache = _BoundedCache(cache_size)

    # -- enumeration --

    def __iter__(self):
        seen = set()
        for sub in sorted(self.objects_dir.iterdir()) if self.objects_dir.is_dir() else []:
            if len(sub.name) == 2 and set(sub.name) <= _HEX:
                for f in sorted(sub.iterdir()):
                    if len(f.name) == 38 and set(f.name) <= _HEX:
                        oid = ObjectId.from_hex(sub.name + f.name)
                        seen.add(oid)
                        yield oid
        for pack in self.packs:
            for oid, _ in pack.index.entries():
                if oid not in seen:
                    seen.add(oid)
                    yield oid

    def __contains__(self, oid: ObjectId) -> bool:
        if self._loose_path(oid).exists():
            return True
        return any(p.index.find(oid.raw) is not None for p in self.packs)

    def _loose_path(self, oid: ObjectId) -> Path:
        hx = oid.hex
        return self.objects_dir / hx[:2] / hx[2:]

    # -- reads --

    def read(self, oid: ObjectId) -> GitObject:
        kind, payload = self._read_raw(oid, depth=0)
        obj = GitObject(kind, payload)
        if self.verify and obj.id() != oid:
            raise CorruptObject(f"{oid.hex}: content hashes to {obj.id().hex}")
        return obj

    def _read_raw(self, oid: ObjectId, depth: int) -> tuple[str, bytes]:
        cached = self._cache.get(oid)
        if cached is not None:
            return cached
        loose = self._loose_path(oid)
        if loose.exists():
            result = self._parse_loose(loose)
        else:
            for pack in self.packs:
                offset = pack.index.find(oid.raw)
                if offset is not None:
                    result = self._read_packed(pack, offset, depth)
                    break
            else:
                raise ObjectNotFound(oid.hex)
        self._cache.put(oid, result)
        return result

    def _parse_loose(self, path: Path) -> tuple[str, bytes]:
        try:
            raw = zlib.decompress(path.read_bytes())
        except zlib.error as exc:
            raise CorruptObject(f"{path}: {exc}") from exc
        try:
            header, payload = raw.split(b"\x00", 1)
            kind, size = header.split(b" ", 1)
        except ValueError as exc:
            raise CorruptObject(f"{path}: malformed loose header") from exc
        if int(size) != len(payload):
            raise CorruptObject(f"{path}: size {size.decode()} != payload {len(payload)}")
        return kind.decode(), payload

    def _read_packed(self, pack: _Pack, offset: int, depth: int) -> tuple[str, bytes]:
        if depth > MAX_DELTA_DEPTH:
            raise DeltaDepthExceeded(f"{pack.path}: delta chain deeper than {MAX_DELTA_DEPTH}")
        type_code, data, base = pack.read_raw(offset)
        if type_code == _OBJ_OFS_DELTA:
            base_kind, base_payload = self._read_packed(pack, base, depth + 1)
            return base_kind, _apply_delta(base_payload, data)
        if type_code == _OBJ_REF_DELTA:
            base_id = ObjectId(base)
            try:
                base_kind, base_payload = self._read_raw(base_id, depth + 1)
            except ObjectNotFound as exc:
                raise DeltaBaseMissing(f"{pack.path}: base {base_id.hex} absent") from exc
            return base_kind, _apply_delta(base_payload, data)
        if type_code in _TYPE_NAMES:
            return _TYPE_NAMES[type_code], data
        raise CorruptObject(f"{pack.path}: unknown object type {type_code} at {offset}")

    # -- refs --

    def refs(self) -> dict[str, ObjectId]:
        """All refs (branches, tags, HEAD if detached), unpeeled."""
        out: dict[str, ObjectId] = {}
        packed = self.git_dir / "packed-refs"
        if packed.exists():
            for line in packed.read_text().splitlines():
                if not line or line.startswith("#") or line.startswith("^"):
                    continue
                hx, _, name = line.partition(" ")
                if len(hx) == 40 and set(hx) <= _HEX:
                    out[name] = ObjectId.from_hex(hx)
        refs_dir = self.git_dir / "refs"
        if refs_dir.is_dir():
            for path in sorted(refs_dir.rglob("*")):
                if path.is_file():
                    text = path.read_text().strip()
                    if len(text) == 40 and set(text) <= _HEX:
                        out[str(path.relative_to(self.git_dir))] = ObjectId.from_hex(text)
        head = self.git_dir / "HEAD"
        if head.exists():
            text = head.read_text().strip()
            if len(text) == 40 and set(text) <= _HEX:
                out["HEAD"] = ObjectId.from_hex(text)
        return out

    def close(self):
        for pack in self.packs:
            pack.close()


def open_store(repo_path: str | os.PathLike, verify: bool = True) -> ObjectStore:
    """Open a repository's object database for reading."""
    return ObjectStore(repo_path, verify=verify)


def parse_commit(obj: GitObject) -> CommitHeader:
    """Extract tree, parents, identities and times from a commit object."""
    if obj.kind != "commit":
        raise MalformedCommitHeader(f"expected commit, got {obj.kind}")
    tree = None
    parents = []
    author = None
    author_time = author_tz = None
    committer_time = committer_tz = None
    for line in obj.payload.split(b"\n"):
        if not line:
            break  # header ends at the blank line before the message
        key, _, value = line.partition(b" ")
        if key == b"tree":
            tree = _id_from(value)
        elif key == b"parent":
            parents.append(_id_from(value))
        elif key == b"author":
            author, author_time, author_tz = _parse_identity(value)
        elif key == b"committer":
            _, committer_time, committer_tz = _parse_identity(value)
    if tree is None or author is None or committer_time is None:
        raise MalformedCommitHeader("missing tree/author/committer line")
    return CommitHeader(
        tree=tree,
        parents=tuple(parents),
        author=author,
        author_time=author_time,
        author_tz=author_tz,
        committer_time=committer_time,
        committer_tz=committer_tz,
    )


def parse_tag_target(obj: GitObject) -> tuple[ObjectId, str]:
    """Return (target id, target kind) of an annotated tag."""
    target = None
    kind = None
    for line in obj.payload.split(b"\n"):
        if not line:
            break
        key, _, value = line.partition(b" ")
        if key == b"object":
            target = _id_from(value)
        elif key == b"type":
            kind = value.decode()
    if target is None or kind is None:
        raise CorruptObject("tag object missing object/type header")
    return target, kind


def _id_from(value: bytes) -> ObjectId:
    try:
        return ObjectId.from_hex(value.decode())
    except (ValueError, UnicodeDecodeError) as exc:
        raise MalformedCommitHeader(f"bad object id {value!r}") from exc


def _parse_identity(value: bytes) -> tuple[str, int, int]:
    """Split "Name <email> epoch tz" into (identity, epoch, tz seconds)."""
    try:
        ident, _, rest = value.rpartition(b"> ")
        when, _, tz = rest.partition(b" ")
        seconds = int(when)
        sign = -1 if tz.startswith(b"-") else 1
        hours = int(tz[1:3]) if len(tz) >= 5 else 0
        minutes = int(tz[3:5]) if len(tz) >= 5 else 0
        offset = sign * (hours * 3600 + minutes * 60)
        return (ident + b">").decode("utf-8", "surrogateescape"), seconds, offset
    except (ValueError, IndexError) as exc:
        raise MalformedCommitHeader(f"bad identity line {value!r}") from exc


def parse_tree(obj: GitObject) -> list[TreeEntry]:
    """Decode tree payload into entries (git canonical order preserved)."""
    if obj.kind != "tree":
        raise CorruptTree(f"expected tree, got {obj.kind}")
    entries = []
    data = obj.payload
    pos = 0
    while pos < len(data):
        nul = data.find(b"\x00", pos)
        if nul < 0 or nul + 21 > len(data):
            raise CorruptTree(f"truncated tree entry at byte {pos}")
        head = data[pos:nul]
        try:
            mode_bytes, name = head.split(b" ", 1)
            mode = int(mode_bytes, 8)
        except ValueError as exc:
            raise CorruptTree(f"unparseable tree entry {head!r}") from exc
        if not name:
            raise CorruptTree("empty name in tree entry")
        entries.append(TreeEntry(mode, name, ObjectId(data[nul + 1 : nul + 21])))
        pos = nul + 21
    return entries


def walk_tree(store: ObjectStore, tree_id: ObjectId) -> set[tuple[str, ObjectId]]:
    """Recursive listing of (path, blob id).

    Paths are joined with "/" and decoded with surrogateescape so arbitrary
    byte names survive a round-trip.  Gitlink (submodule) entries are skipped;
    symlinks are included as blobs.
    """
    out: set[tuple[str, ObjectId]] = set()
    stack = [(b"", tree_id)]
    while stack:
        prefix, tid = stack.pop()
        for entry in parse_tree(store.read(tid)):
            path = prefix + entry.name if not prefix else prefix + b"/" + entry.name
            if entry.is_gitlink:
                continue
            if entry.is_tree:
                stack.append((path, entry.id))
            else:
                out.add((path.decode("utf-8", "surrogateescape"), entry.id))
    return out
