package com.bank.audit;

public interface AuditLog {
    void record(String entry);

    int size();
}
