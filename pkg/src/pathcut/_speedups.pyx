# cython: language_level=3
"""Compiled Dijkstra kernel over CSR adjacency; mirrors _dijkstra_py exactly."""

import numpy as np

cimport numpy as cnp
from libc.math cimport isinf
from libc.stdlib cimport free, malloc

cnp.import_array()


cdef struct HeapItem:
    double dist
    long node


cdef inline void heap_push(HeapItem* heap, long* size, double d, long node) noexcept nogil:
    cdef long i = size[0]
    cdef long parent
    cdef HeapItem tmp
    heap[i].dist = d
    heap[i].node = node
    size[0] += 1
    while i > 0:
        parent = (i - 1) >> 1
        if heap[parent].dist > heap[i].dist or (
            heap[parent].dist == heap[i].dist and heap[parent].node > heap[i].node
        ):
            tmp = heap[parent]
            heap[parent] = heap[i]
            heap[i] = tmp
            i = parent
        else:
            break


cdef inline HeapItem heap_pop(HeapItem* heap, long* size) noexcept nogil:
    cdef HeapItem top = heap[0]
    cdef long i = 0, child, n
    cdef HeapItem tmp
    size[0] -= 1
    n = size[0]
    heap[0] = heap[n]
    while True:
        child = 2 * i + 1
        if child >= n:
            break
        if child + 1 < n and (
            heap[child + 1].dist < heap[child].dist or (
                heap[child + 1].dist == heap[child].dist
                and heap[child + 1].node < heap[child].node
            )
        ):
            child += 1
        if heap[child].dist < heap[i].dist or (
            heap[child].dist == heap[i].dist and heap[child].node < heap[i].node
        ):
            tmp = heap[child]
            heap[child] = heap[i]
            heap[i] = tmp
            i = child
        else:
            break
    return top


def dijkstra_csr(
    long n,
    cnp.int64_t[::1] indptr,
    cnp.int64_t[::1] nbr,
    cnp.int64_t[::1] eidx,
    cnp.float64_t[::1] weight,
    cnp.uint8_t[::1] deleted,
    long source,
):
    """Single-source distances; returns (dist, parent_node, parent_edge)."""
    cdef long m2 = nbr.shape[0]
    dist_arr = np.full(n, np.inf)
    parent_node_arr = np.full(n, -1, dtype=np.int64)
    parent_edge_arr = np.full(n, -1, dtype=np.int64)
    cdef cnp.float64_t[::1] dist = dist_arr
    cdef cnp.int64_t[::1] parent_node = parent_node_arr
    cdef cnp.int64_t[::1] parent_edge = parent_edge_arr
    cdef unsigned char* done = <unsigned char*> malloc(n * sizeof(unsigned char))
    cdef HeapItem* heap = <HeapItem*> malloc((m2 + n + 2) * sizeof(HeapItem))
    if done == NULL or heap == NULL:
        free(done)
        free(heap)
        raise MemoryError()
    cdef long size = 0
    cdef long u, v, k, e
    cdef double d, nd, du
    cdef HeapItem item
    with nogil:
        for u in range(n):
            done[u] = 0
        dist[source] = 0.0
        heap_push(heap, &size, 0.0, source)
        while size > 0:
            item = heap_pop(heap, &size)
            u = item.node
            if done[u]:
                continue
            done[u] = 1
            d = item.dist
            for k in range(indptr[u], indptr[u + 1]):
                e = eidx[k]
                if deleted[e]:
                    continue
                v = nbr[k]
                nd = d + weight[e]
                if nd < dist[v]:
                    dist[v] = nd
                    heap_push(heap, &size, nd, v)
        for u in range(n):
            du = dist[u]
            if isinf(du):
                continue
            for k in range(indptr[u], indptr[u + 1]):
                e = eidx[k]
                if deleted[e]:
                    continue
                v = nbr[k]
                if v == source:
                    continue
                if du + weight[e] == dist[v] and parent_node[v] == -1:
                    parent_node[v] = u
                    parent_edge[v] = e
    free(done)
    free(heap)
    return dist_arr, parent_node_arr, parent_edge_arr
