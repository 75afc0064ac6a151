package com.bank.audit;

import java.util.ArrayList;
import java.util.List;

public class MemoryAuditLog implements AuditLog {
    private final List<String> entries = new ArrayList<>();

    public MemoryAuditLog() {
    }

    public void record(String entry) {
        entries.add(entry);
    }

    public int size() {
        return entries.size();
    }
}
